/** Client mission model: the server view plus the local ticker.
 *
 * No business logic lives here. Idea order, phase gates, and countdowns
 * all come straight from the view; the model never re-sorts or recomputes
 * what the server already decided.
 */

import { CountdownTicker } from "./countdown.js";
import {
  ACTIVE_IDEA_PHASES,
  DETAIL_PHASES,
  MissionView,
  TERMINAL_PHASES,
} from "./types.js";

export class ClientMissionModel {
  view: MissionView | null = null;
  readonly ticker = new CountdownTicker();
  ideaDraft = "";
  detailDraft = "";

  apply(view: MissionView, nowMs: number): void {
    this.view = view;
    this.ticker.sync(view.seconds_to_next_stage, nowMs);
  }

  /** Exactly the server's order; rendering must not re-sort. */
  get ideas(): MissionView["ideas"] {
    return this.view?.ideas ?? [];
  }

  get phase(): string {
    return this.view?.phase ?? "";
  }

  get canSuggestOrVote(): boolean {
    return ACTIVE_IDEA_PHASES.includes(this.phase);
  }

  get canAddDetails(): boolean {
    return DETAIL_PHASES.includes(this.phase);
  }

  get isTerminal(): boolean {
    return TERMINAL_PHASES.includes(this.phase);
  }

  countdownSeconds(nowMs: number): number | null {
    return this.ticker.remaining(nowMs);
  }

  /** Countdown reached zero but the poll has not shown the new phase. */
  transitionPending(nowMs: number): boolean {
    return !this.isTerminal && this.ticker.transitionPending(nowMs);
  }
}
