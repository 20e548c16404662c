/** Typed client for the documented HTTP endpoints; nothing else. */

import { MissionListEntry, MissionView } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    detail: string,
  ) {
    super(detail);
  }
}

async function request<T>(
  method: string,
  path: string,
  body?: unknown,
): Promise<T> {
  const response = await fetch(path, {
    method,
    headers: body === undefined ? {} : { "Content-Type": "application/json" },
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  const payload = await response.json().catch(() => ({}));
  if (!response.ok) {
    const record = payload as { error?: string; detail?: string };
    throw new ApiError(
      response.status,
      record.error ?? `HTTP${response.status}`,
      record.detail ?? response.statusText,
    );
  }
  return payload as T;
}

export interface CreateMissionRequest {
  name: string;
  rationale: string;
  hashtag: string;
  selection_deadline: string;
  execution_time: string;
  creator: string;
  kickoff_text?: string;
}

export function createMission(
  body: CreateMissionRequest,
): Promise<MissionView> {
  return request("POST", "/missions", body);
}

export function listMissions(): Promise<MissionListEntry[]> {
  return request("GET", "/missions");
}

export function getMission(missionId: string): Promise<MissionView> {
  return request("GET", `/missions/${encodeURIComponent(missionId)}`);
}

export function submitIdea(
  missionId: string,
  author: string,
  text: string,
): Promise<MissionView> {
  return request("POST", `/missions/${encodeURIComponent(missionId)}/ideas`, {
    author,
    text,
  });
}

/** The single "support" gesture; counts once per participant and idea. */
export function supportIdea(
  missionId: string,
  author: string,
  ideaId: string,
): Promise<MissionView> {
  return request("POST", `/missions/${encodeURIComponent(missionId)}/votes`, {
    author,
    idea_id: ideaId,
    kind: "favorite",
  });
}

export function addDetail(
  missionId: string,
  author: string,
  text: string,
): Promise<MissionView> {
  return request(
    "POST",
    `/missions/${encodeURIComponent(missionId)}/details`,
    { author, text },
  );
}

export function subscribe(
  missionId: string,
  author: string,
  phases: string[],
): Promise<MissionView> {
  return request(
    "POST",
    `/missions/${encodeURIComponent(missionId)}/subscribe`,
    { author, phases },
  );
}

export function cancelMission(
  missionId: string,
  author: string,
): Promise<MissionView> {
  return request(
    "POST",
    `/missions/${encodeURIComponent(missionId)}/cancel`,
    { author },
  );
}
