/** DOM rendering for the mission page and list. Pure view code: every
 * enable/disable decision reads the model, which mirrors the server. */

import * as api from "./api.js";
import { formatCountdown } from "./countdown.js";
import { ClientMissionModel } from "./model.js";
import { SUBSCRIBABLE_PHASES, TimelineGroup } from "./types.js";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function whoAmI(): string {
  let handle = localStorage.getItem("rallypoint.handle") ?? "";
  if (!handle) {
    handle = window.prompt("Your handle (no account needed):") ?? "";
    handle = handle.trim();
    if (handle) localStorage.setItem("rallypoint.handle", handle);
  }
  return handle;
}

export class MissionPage {
  readonly model = new ClientMissionModel();
  private readonly root: HTMLElement;
  private readonly banner = el("div", "banner hidden");
  private readonly content = el("div", "mission");
  private tickTimer: ReturnType<typeof setInterval> | null = null;
  private activeTab: string | null = null;

  constructor(
    root: HTMLElement,
    private readonly refresh: () => Promise<void>,
  ) {
    this.root = root;
    this.root.replaceChildren(this.banner, this.content);
    this.tickTimer = setInterval(() => this.renderCountdown(), 1000);
  }

  dispose(): void {
    if (this.tickTimer !== null) clearInterval(this.tickTimer);
  }

  setOffline(offline: boolean): void {
    this.banner.textContent = offline
      ? "offline: retrying automatically"
      : "";
    this.banner.classList.toggle("hidden", !offline);
  }

  notFound(): void {
    this.content.replaceChildren(
      el("h2", undefined, "No such mission"),
      el("p", undefined, "It may have been created elsewhere; check the id."),
    );
  }

  render(): void {
    const view = this.model.view;
    if (!view) return;
    const header = el("div", "mission-head");
    header.append(
      el("h2", undefined, `${view.name} ${view.hashtag}`),
      el("p", "rationale",
        view.rationale ? `Important because: ${view.rationale}` : ""),
      this.phaseLine(),
    );

    const ideas = el("section", "ideas");
    ideas.append(el("h3", undefined, "Ideas (most supported first)"));
    if (this.model.ideas.length === 0) {
      ideas.append(el("p", "muted", "No ideas yet."));
    }
    for (const idea of this.model.ideas) {
      const row = el("div", "idea-row");
      row.append(
        el("span", "rank", `#${idea.rank}`),
        el("span", "idea-text",
          idea.idea_id === view.winner
            ? `★ ${idea.display_text}`
            : idea.display_text),
        el("span", "votes", `${idea.votes}`),
      );
      const support = el("button", "support", "support");
      support.disabled = !this.model.canSuggestOrVote;
      support.onclick = async () => {
        support.disabled = true;
        try {
          await api.supportIdea(view.mission_id, whoAmI(), idea.idea_id);
          await this.refresh();
        } finally {
          support.disabled = !this.model.canSuggestOrVote;
        }
      };
      row.append(support);
      ideas.append(row);
    }
    if (this.model.canSuggestOrVote) {
      ideas.append(this.ideaForm());
    }

    const sections = [header, ideas];
    if (this.model.canAddDetails) {
      sections.push(this.detailsSection());
    } else if (view.details.length > 0) {
      sections.push(this.detailsList());
    }
    sections.push(this.subscribeSection(), this.leadersSection(),
                  this.timelineSection(view.timeline));
    this.content.replaceChildren(...sections);
    this.renderCountdown();
  }

  private phaseLine(): HTMLElement {
    const line = el("div", "phase-line");
    line.append(el("span", "phase", this.model.phase));
    line.append(el("span", "countdown", ""));
    return line;
  }

  private renderCountdown(): void {
    const slot = this.content.querySelector(".countdown");
    if (!slot) return;
    const now = Date.now();
    const remaining = this.model.countdownSeconds(now);
    if (this.model.isTerminal || remaining === null) {
      slot.textContent = "";
    } else if (this.model.transitionPending(now)) {
      slot.textContent = "transition pending…";
    } else {
      slot.textContent = `next stage in ${formatCountdown(remaining)}`;
    }
  }

  private ideaForm(): HTMLElement {
    const form = el("div", "idea-form");
    const input = el("input");
    input.placeholder = "Suggest an idea";
    input.value = this.model.ideaDraft;
    input.oninput = () => (this.model.ideaDraft = input.value);
    const button = el("button", undefined, "suggest");
    button.onclick = async () => {
      const view = this.model.view;
      if (!view || !input.value.trim()) return;
      await api.submitIdea(view.mission_id, whoAmI(), input.value);
      this.model.ideaDraft = "";
      await this.refresh();
    };
    form.append(input, button);
    return form;
  }

  private detailsSection(): HTMLElement {
    const section = this.detailsList();
    const form = el("div", "detail-form");
    const input = el("input");
    input.placeholder = "Add a detail (where, when, what to bring)";
    input.value = this.model.detailDraft;
    input.oninput = () => (this.model.detailDraft = input.value);
    const button = el("button", undefined, "add detail");
    button.onclick = async () => {
      const view = this.model.view;
      if (!view || !input.value.trim()) return;
      await api.addDetail(view.mission_id, whoAmI(), input.value);
      this.model.detailDraft = "";
      await this.refresh();
    };
    form.append(input, button);
    section.append(form);
    return section;
  }

  private detailsList(): HTMLElement {
    const section = el("section", "details");
    section.append(el("h3", undefined, "Details"));
    for (const detail of this.model.view?.details ?? []) {
      section.append(el("p", "detail", `${detail.author}: ${detail.text}`));
    }
    return section;
  }

  private subscribeSection(): HTMLElement {
    const view = this.model.view;
    const section = el("section", "subscribe");
    section.append(el("h3", undefined, "Follow just the stages you want"));
    const chosen = new Set<string>();
    for (const phase of SUBSCRIBABLE_PHASES) {
      const label = el("label", "sub-toggle");
      const box = el("input");
      box.type = "checkbox";
      box.value = phase;
      box.disabled = this.model.isTerminal;
      box.onchange = async () => {
        if (box.checked) chosen.add(phase);
        else chosen.delete(phase);
        if (view) {
          await api.subscribe(view.mission_id, whoAmI(), [...chosen]);
        }
      };
      label.append(box, document.createTextNode(` ${phase}`));
      section.append(label);
    }
    return section;
  }

  private leadersSection(): HTMLElement {
    const section = el("section", "leaders");
    section.append(el("h3", undefined, "Most active"));
    const leaders = this.model.view?.leaders ?? [];
    for (const leader of leaders.slice(0, 5)) {
      section.append(
        el("p", "leader", `${leader.participant} · ${leader.score}`));
    }
    if (leaders.length === 0) {
      section.append(el("p", "muted", "Nobody yet."));
    }
    return section;
  }

  private timelineSection(groups: TimelineGroup[]): HTMLElement {
    const section = el("section", "timeline");
    section.append(el("h3", undefined, "Timeline by stage"));
    const tabs = el("div", "tabs");
    const body = el("div", "tab-body");
    if (this.activeTab === null && groups.length > 0) {
      this.activeTab = groups[groups.length - 1].phase;
    }
    for (const group of groups) {
      const tab = el("button", "tab", `${group.phase}`);
      if (group.phase === this.activeTab) tab.classList.add("active");
      tab.onclick = () => {
        this.activeTab = group.phase;
        this.render();
      };
      tabs.append(tab);
    }
    const active = groups.find((g) => g.phase === this.activeTab);
    for (const event of active?.events ?? []) {
      const kind = String(event["kind"] ?? "");
      const at = String(event["at"] ?? "");
      body.append(el("p", "event", `${at} · ${summarize(kind, event)}`));
    }
    section.append(tabs, body);
    return section;
  }
}

function summarize(kind: string, event: Record<string, unknown>): string {
  const payload = (event["payload"] ?? {}) as Record<string, unknown>;
  switch (kind) {
    case "MissionCreated":
      return `mission created by ${payload["creator"]}`;
    case "IdeaSubmitted":
      return `${payload["author"]} suggested: ${payload["display_text"]}`;
    case "VoteCast":
      return `${payload["voter"]} supported an idea`;
    case "DetailAdded":
      return `${payload["author"]} added: ${payload["text"]}`;
    case "PhaseTransitioned":
      return `stage changed to ${payload["to_phase"]}`;
    case "MessagePosted":
      return `posted: ${payload["text"]}`;
    case "SubscriptionChanged":
      return `${payload["participant"]} updated their subscription`;
    case "MissionCancelled":
      return `mission cancelled by ${payload["by"]}`;
    default:
      return kind;
  }
}
