/** Inline form validation mirroring the server's mission invariants.
 *
 * The server remains authoritative; this only prevents requests that
 * would come back 400.
 */
import { countCodePoints, overLimit } from "./codepoints.js";
export const NAME_LIMIT = 60;
const HASHTAG = /^#[a-z0-9_]{1,30}$/;
export function normalizeHashtag(raw) {
    const trimmed = raw.trim().toLowerCase();
    if (!trimmed)
        return trimmed;
    return trimmed.startsWith("#") ? trimmed : `#${trimmed}`;
}
export function validateMissionForm(fields, now) {
    const errors = {};
    const name = fields.name.trim();
    if (!name) {
        errors.name = "name is required";
    }
    else if (countCodePoints(name) > NAME_LIMIT) {
        errors.name = `name must be at most ${NAME_LIMIT} characters`;
    }
    if (!HASHTAG.test(normalizeHashtag(fields.hashtag))) {
        errors.hashtag = "hashtag must be #lowercase letters, digits, _ (max 30)";
    }
    if (!fields.creator.trim()) {
        errors.creator = "your handle is required";
    }
    const selection = parseWhen(fields.selection_deadline);
    const execution = parseWhen(fields.execution_time);
    if (!selection) {
        errors.selection_deadline = "enter a valid date and time";
    }
    else if (selection.getTime() <= now.getTime()) {
        errors.selection_deadline = "selection deadline must be in the future";
    }
    if (!execution) {
        errors.execution_time = "enter a valid date and time";
    }
    else if (selection && execution.getTime() <= selection.getTime()) {
        errors.execution_time = "execution must come after the selection deadline";
    }
    return errors;
}
export function kickoffError(text) {
    if (overLimit(text)) {
        return `kickoff is ${countCodePoints(text)} characters; the limit is 140`;
    }
    return null;
}
function parseWhen(value) {
    if (!value)
        return null;
    const parsed = new Date(value);
    return Number.isNaN(parsed.getTime()) ? null : parsed;
}
