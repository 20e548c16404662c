/** Typed client for the documented HTTP endpoints; nothing else. */
export class ApiError extends Error {
    constructor(status, code, detail) {
        super(detail);
        this.status = status;
        this.code = code;
    }
}
async function request(method, path, body) {
    const response = await fetch(path, {
        method,
        headers: body === undefined ? {} : { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json().catch(() => ({}));
    if (!response.ok) {
        const record = payload;
        throw new ApiError(response.status, record.error ?? `HTTP${response.status}`, record.detail ?? response.statusText);
    }
    return payload;
}
export function createMission(body) {
    return request("POST", "/missions", body);
}
export function listMissions() {
    return request("GET", "/missions");
}
export function getMission(missionId) {
    return request("GET", `/missions/${encodeURIComponent(missionId)}`);
}
export function submitIdea(missionId, author, text) {
    return request("POST", `/missions/${encodeURIComponent(missionId)}/ideas`, {
        author,
        text,
    });
}
/** The single "support" gesture; counts once per participant and idea. */
export function supportIdea(missionId, author, ideaId) {
    return request("POST", `/missions/${encodeURIComponent(missionId)}/votes`, {
        author,
        idea_id: ideaId,
        kind: "favorite",
    });
}
export function addDetail(missionId, author, text) {
    return request("POST", `/missions/${encodeURIComponent(missionId)}/details`, { author, text });
}
export function subscribe(missionId, author, phases) {
    return request("POST", `/missions/${encodeURIComponent(missionId)}/subscribe`, { author, phases });
}
export function cancelMission(missionId, author) {
    return request("POST", `/missions/${encodeURIComponent(missionId)}/cancel`, { author });
}
