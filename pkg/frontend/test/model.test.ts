import { describe, expect, it } from "vitest";

import { ClientMissionModel } from "../src/model.js";
import { MissionView } from "../src/types.js";

function view(overrides: Partial<MissionView> = {}): MissionView {
  return {
    mission_id: "parkday",
    name: "Park cleanup",
    rationale: "our park deserves better",
    hashtag: "#parkday",
    selection_deadline: "2014-05-02T12:00:00Z",
    execution_time: "2014-05-03T12:00:00Z",
    creator: "haoqi",
    created_at: "2014-05-01T12:00:00Z",
    phase: "Ideation",
    ideas: [
      { idea_id: "i0002", display_text: "Plant trees", votes: 3, rank: 1 },
      { idea_id: "i0001", display_text: "Pick up litter", votes: 1, rank: 2 },
    ],
    winner: null,
    details: [],
    leaders: [],
    timeline: [],
    seconds_to_next_stage: 14400,
    ...overrides,
  };
}

describe("ClientMissionModel", () => {
  it("preserves the server's idea order exactly", () => {
    const model = new ClientMissionModel();
    const served = view();
    model.apply(served, 0);
    expect(model.ideas.map((i) => i.idea_id)).toEqual(["i0002", "i0001"]);
    expect(model.ideas).toBe(served.ideas); // same array, never re-sorted
  });

  it("derives every gate from the phase", () => {
    const model = new ClientMissionModel();
    model.apply(view({ phase: "Voting" }), 0);
    expect(model.canSuggestOrVote).toBe(true);
    expect(model.canAddDetails).toBe(false);

    model.apply(view({ phase: "Planning" }), 0);
    expect(model.canSuggestOrVote).toBe(false);
    expect(model.canAddDetails).toBe(true);

    model.apply(view({ phase: "Completed" }), 0);
    expect(model.canSuggestOrVote).toBe(false);
    expect(model.canAddDetails).toBe(false);
    expect(model.isTerminal).toBe(true);
  });

  it("phase flip arrives with the next applied poll", () => {
    const model = new ClientMissionModel();
    model.apply(view({ phase: "Voting" }), 0);
    model.apply(view({ phase: "Planning", seconds_to_next_stage: 82800 }),
                5000);
    expect(model.phase).toBe("Planning");
    expect(model.countdownSeconds(6000)).toBe(82799);
  });

  it("shows transition pending at zero until the poll catches up", () => {
    const model = new ClientMissionModel();
    model.apply(view({ seconds_to_next_stage: 2 }), 0);
    expect(model.transitionPending(1_000)).toBe(false);
    expect(model.transitionPending(3_000)).toBe(true);
    model.apply(view({ phase: "Voting", seconds_to_next_stage: 72000 }),
                4_000);
    expect(model.transitionPending(5_000)).toBe(false);
  });
});
