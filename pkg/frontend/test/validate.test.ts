import { describe, expect, it } from "vitest";

import {
  MissionFormFields,
  normalizeHashtag,
  validateMissionForm,
} from "../src/validate.js";

const NOW = new Date("2014-05-01T12:00:00Z");

function fields(overrides: Partial<MissionFormFields> = {}): MissionFormFields {
  return {
    name: "Park cleanup",
    rationale: "our park deserves better",
    hashtag: "#parkday",
    selection_deadline: "2014-05-02T12:00:00Z",
    execution_time: "2014-05-03T12:00:00Z",
    creator: "haoqi",
    ...overrides,
  };
}

describe("validateMissionForm", () => {
  it("accepts the park mission", () => {
    expect(validateMissionForm(fields(), NOW)).toEqual({});
  });

  it("rejects an empty name", () => {
    expect(validateMissionForm(fields({ name: "  " }), NOW)).toHaveProperty(
      "name",
    );
  });

  it("rejects a name over 60 code points", () => {
    const errors = validateMissionForm(fields({ name: "x".repeat(61) }), NOW);
    expect(errors.name).toMatch(/60/);
  });

  it("rejects a hashtag with spaces before any request", () => {
    const errors = validateMissionForm(fields({ hashtag: "#Park Day" }), NOW);
    expect(errors.hashtag).toBeTruthy();
  });

  it("rejects execution before selection inline", () => {
    const errors = validateMissionForm(
      fields({
        selection_deadline: "2014-05-03T12:00:00Z",
        execution_time: "2014-05-02T12:00:00Z",
      }),
      NOW,
    );
    expect(errors.execution_time).toBeTruthy();
  });

  it("rejects a selection deadline in the past", () => {
    const errors = validateMissionForm(
      fields({ selection_deadline: "2014-04-30T12:00:00Z" }),
      NOW,
    );
    expect(errors.selection_deadline).toBeTruthy();
  });
});

describe("normalizeHashtag", () => {
  it("lowercases and prefixes", () => {
    expect(normalizeHashtag("ParkDay")).toBe("#parkday");
    expect(normalizeHashtag("#parkday")).toBe("#parkday");
  });
});
