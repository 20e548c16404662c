/** Server view shapes, mirrored verbatim from the HTTP API. */
export const ACTIVE_IDEA_PHASES = ["Ideation", "Voting"];
export const DETAIL_PHASES = ["Planning", "ActionPending"];
export const TERMINAL_PHASES = ["Completed", "Failed", "Cancelled"];
export const SUBSCRIBABLE_PHASES = [
    "Ideation",
    "Voting",
    "Planning",
    "ActionPending",
];
