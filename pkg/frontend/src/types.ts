/** Server view shapes, mirrored verbatim from the HTTP API. */

export interface IdeaView {
  idea_id: string;
  display_text: string;
  votes: number;
  rank: number;
}

export interface DetailView {
  author: string;
  text: string;
  at: string;
}

export interface LeaderView {
  participant: string;
  score: number;
}

export interface TimelineGroup {
  phase: string;
  events: Record<string, unknown>[];
}

export interface MissionView {
  mission_id: string;
  name: string;
  rationale: string;
  hashtag: string;
  selection_deadline: string;
  execution_time: string;
  creator: string;
  created_at: string;
  phase: string;
  ideas: IdeaView[];
  winner: string | null;
  details: DetailView[];
  leaders: LeaderView[];
  timeline: TimelineGroup[];
  seconds_to_next_stage?: number;
  suggested_kickoff?: string;
}

export interface MissionListEntry {
  mission_id: string;
  name: string;
  hashtag: string;
  phase: string;
  next_trigger?: string;
  seconds_to_next_stage?: number;
}

export const ACTIVE_IDEA_PHASES = ["Ideation", "Voting"];
export const DETAIL_PHASES = ["Planning", "ActionPending"];
export const TERMINAL_PHASES = ["Completed", "Failed", "Cancelled"];
export const SUBSCRIBABLE_PHASES = [
  "Ideation",
  "Voting",
  "Planning",
  "ActionPending",
];
