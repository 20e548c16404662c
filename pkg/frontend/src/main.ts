/** Hash router: #/ mission list, #/new creation form, #/m/<id> mission. */

import * as api from "./api.js";
import { checkForm, draftKickoff } from "./form.js";
import { MissionPage, el, whoAmI } from "./page.js";
import { Poller } from "./poll.js";
import { MissionFormFields } from "./validate.js";

let poller: Poller | null = null;
let page: MissionPage | null = null;

function teardown(): void {
  poller?.stop();
  poller = null;
  page?.dispose();
  page = null;
}

function route(): void {
  teardown();
  const root = document.getElementById("app");
  if (!root) return;
  const hash = window.location.hash || "#/";
  const missionMatch = /^#\/m\/(.+)$/.exec(hash);
  if (hash === "#/new") {
    renderForm(root);
  } else if (missionMatch) {
    renderMission(root, decodeURIComponent(missionMatch[1]));
  } else {
    void renderList(root);
  }
}

async function renderList(root: HTMLElement): Promise<void> {
  root.replaceChildren(el("p", "muted", "loading…"));
  const newLink = el("a", "button-link", "Start a mission");
  newLink.href = "#/new";
  try {
    const missions = await api.listMissions();
    const list = el("div", "mission-list");
    if (missions.length === 0) {
      list.append(el("p", "muted", "No missions yet. Start one!"));
    }
    for (const mission of missions) {
      const link = el("a", "mission-card");
      link.href = `#/m/${encodeURIComponent(mission.mission_id)}`;
      link.append(
        el("strong", undefined, `${mission.name} ${mission.hashtag}`),
        el("span", "phase", mission.phase),
      );
      list.append(link);
    }
    root.replaceChildren(el("h2", undefined, "Missions"), newLink, list);
  } catch {
    root.replaceChildren(
      el("p", "banner", "cannot reach the server; retry shortly"), newLink);
  }
}

function formFields(form: HTMLElement): MissionFormFields {
  const value = (name: string): string =>
    (form.querySelector(`[name=${name}]`) as HTMLInputElement | null)?.value ??
    "";
  return {
    name: value("name"),
    rationale: value("rationale"),
    hashtag: value("hashtag"),
    selection_deadline: value("selection_deadline"),
    execution_time: value("execution_time"),
    creator: value("creator"),
  };
}

function renderForm(root: HTMLElement): void {
  const form = el("div", "mission-form");
  const rows: Array<[keyof MissionFormFields, string, string]> = [
    ["name", "Mission name", "text"],
    ["rationale", "This mission is important to me because…", "text"],
    ["hashtag", "Hashtag", "text"],
    ["selection_deadline", "Select the idea by", "datetime-local"],
    ["execution_time", "Do it at", "datetime-local"],
    ["creator", "Your handle", "text"],
  ];
  for (const [name, label, type] of rows) {
    const row = el("label", "form-row");
    row.append(el("span", undefined, label));
    const input = el("input");
    input.name = name;
    input.type = type;
    if (name === "creator") input.value = whoAmI();
    row.append(input, el("small", `err err-${name}`, ""));
    form.append(row);
  }

  const kickoffRow = el("label", "form-row");
  kickoffRow.append(el("span", undefined,
                       "Kickoff post (editable, 140 max)"));
  const kickoff = el("textarea", "kickoff");
  const counter = el("small", "counter", "0 / 140");
  const kickoffErr = el("small", "err err-kickoff", "");
  kickoffRow.append(kickoff, counter, kickoffErr);
  form.append(kickoffRow);

  const submit = el("button", "primary", "Create mission");
  const serverErr = el("p", "err", "");
  form.append(submit, serverErr);

  let kickoffTouched = false;
  const sync = (): void => {
    const fields = formFields(form);
    if (!kickoffTouched) kickoff.value = draftKickoff(fields);
    const check = checkForm(fields, kickoff.value, new Date());
    counter.textContent = `${check.counter.used} / ${check.counter.limit}`;
    counter.classList.toggle("over", check.counter.over);
    kickoffErr.textContent = check.kickoffError ?? "";
    for (const [field, message] of Object.entries(check.errors)) {
      const slot = form.querySelector(`.err-${field}`);
      if (slot) slot.textContent = message ?? "";
    }
    for (const row of rows) {
      if (!(row[0] in check.errors)) {
        const slot = form.querySelector(`.err-${row[0]}`);
        if (slot) slot.textContent = "";
      }
    }
    submit.disabled = !check.submittable;
  };
  form.addEventListener("input", (event) => {
    if (event.target === kickoff) kickoffTouched = true;
    sync();
  });
  sync();

  submit.onclick = async () => {
    const check = checkForm(formFields(form), kickoff.value, new Date());
    if (!check.request) return;
    submit.disabled = true;
    try {
      const view = await api.createMission(check.request);
      window.location.hash = `#/m/${encodeURIComponent(view.mission_id)}`;
    } catch (error) {
      serverErr.textContent =
        error instanceof api.ApiError
          ? `${error.code}: ${error.message}`
          : "request failed";
      submit.disabled = false;
    }
  };

  root.replaceChildren(el("h2", undefined, "Start a mission"), form);
}

function renderMission(root: HTMLElement, missionId: string): void {
  const refresh = async (): Promise<void> => {
    try {
      const view = await api.getMission(missionId);
      page?.model.apply(view, Date.now());
      page?.render();
      page?.setOffline(false);
    } catch (error) {
      if (error instanceof api.ApiError && error.status === 404) {
        page?.notFound();
        poller?.stop();
        return;
      }
      page?.setOffline(true);
      throw error;
    }
  };
  page = new MissionPage(root, refresh);
  poller = new Poller(refresh);
  poller.start();
}

window.addEventListener("hashchange", route);
window.addEventListener("DOMContentLoaded", route);
