/** Client mission model: the server view plus the local ticker.
 *
 * No business logic lives here. Idea order, phase gates, and countdowns
 * all come straight from the view; the model never re-sorts or recomputes
 * what the server already decided.
 */
import { CountdownTicker } from "./countdown.js";
import { ACTIVE_IDEA_PHASES, DETAIL_PHASES, TERMINAL_PHASES, } from "./types.js";
export class ClientMissionModel {
    constructor() {
        this.view = null;
        this.ticker = new CountdownTicker();
        this.ideaDraft = "";
        this.detailDraft = "";
    }
    apply(view, nowMs) {
        this.view = view;
        this.ticker.sync(view.seconds_to_next_stage, nowMs);
    }
    /** Exactly the server's order; rendering must not re-sort. */
    get ideas() {
        return this.view?.ideas ?? [];
    }
    get phase() {
        return this.view?.phase ?? "";
    }
    get canSuggestOrVote() {
        return ACTIVE_IDEA_PHASES.includes(this.phase);
    }
    get canAddDetails() {
        return DETAIL_PHASES.includes(this.phase);
    }
    get isTerminal() {
        return TERMINAL_PHASES.includes(this.phase);
    }
    countdownSeconds(nowMs) {
        return this.ticker.remaining(nowMs);
    }
    /** Countdown reached zero but the poll has not shown the new phase. */
    transitionPending(nowMs) {
        return !this.isTerminal && this.ticker.transitionPending(nowMs);
    }
}
