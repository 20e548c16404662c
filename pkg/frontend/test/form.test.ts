import { describe, expect, it } from "vitest";

import { checkForm, draftKickoff } from "../src/form.js";
import { MissionFormFields } from "../src/validate.js";

const NOW = new Date("2014-05-01T12:00:00Z");

function fields(): MissionFormFields {
  return {
    name: "Park cleanup",
    rationale: "our park deserves better",
    hashtag: "#parkday",
    selection_deadline: "2014-05-02T12:00:00Z",
    execution_time: "2014-05-03T12:00:00Z",
    creator: "haoqi",
  };
}

describe("checkForm", () => {
  it("is submittable with valid fields and a short kickoff", () => {
    const check = checkForm(fields(), draftKickoff(fields()), NOW);
    expect(check.submittable).toBe(true);
    expect(check.request?.hashtag).toBe("#parkday");
    expect(check.request?.kickoff_text).toContain("#parkday");
  });

  it("blocks a 150-code-point kickoff and flags the counter", () => {
    const kickoff = "#parkday idea: " + "x".repeat(135); // 150 total
    const check = checkForm(fields(), kickoff, NOW);
    expect(check.counter.used).toBe(150);
    expect(check.counter.over).toBe(true);
    expect(check.kickoffError).toMatch(/150/);
    expect(check.submittable).toBe(false);
    expect(check.request).toBeUndefined();
  });

  it("allows exactly 140 code points", () => {
    const kickoff = "#parkday idea: " + "x".repeat(125); // 140 total
    const check = checkForm(fields(), kickoff, NOW);
    expect(check.counter.used).toBe(140);
    expect(check.submittable).toBe(true);
  });

  it("counts astral code points once", () => {
    const kickoff = "#parkday idea: " + "\u{1F332}".repeat(125); // 140 points
    const check = checkForm(fields(), kickoff, NOW);
    expect(check.counter.used).toBe(140);
    expect(check.submittable).toBe(true);
  });

  it("field errors also block submission", () => {
    const bad = { ...fields(), hashtag: "#Park Day" };
    const check = checkForm(bad, draftKickoff(bad), NOW);
    expect(check.submittable).toBe(false);
  });
});

describe("draftKickoff", () => {
  it("mentions the name, hashtag, and marker", () => {
    const draft = draftKickoff(fields());
    expect(draft).toContain("Park cleanup");
    expect(draft).toContain("#parkday");
    expect(draft).toContain("idea:");
  });
});
