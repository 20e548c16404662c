/** Mission form state: drafts, validation, and the kickoff gate. */

import { CreateMissionRequest } from "./api.js";
import { countCodePoints, PLATFORM_LIMIT } from "./codepoints.js";
import {
  FieldErrors,
  kickoffError,
  MissionFormFields,
  normalizeHashtag,
  validateMissionForm,
} from "./validate.js";

/** Local preview of the kickoff; the server's template is authoritative
 * and its own suggestion comes back with the created mission. */
export function draftKickoff(fields: MissionFormFields): string {
  const hashtag = normalizeHashtag(fields.hashtag) || "#mission";
  const deadline = fields.selection_deadline
    ? new Date(fields.selection_deadline).toISOString().slice(0, 16).replace("T", " ") + " UTC"
    : "the deadline";
  const name = fields.name.trim() || "New mission";
  const rationale = fields.rationale.trim();
  return `${name} ${hashtag} idea: ${rationale} suggest by ${deadline}`
    .replace(/\s+/g, " ")
    .trim();
}

export interface FormCheck {
  errors: FieldErrors;
  kickoffError: string | null;
  counter: { used: number; limit: number; over: boolean };
  submittable: boolean;
  request?: CreateMissionRequest;
}

export function checkForm(
  fields: MissionFormFields,
  kickoff: string,
  now: Date,
): FormCheck {
  const errors = validateMissionForm(fields, now);
  const kickoffProblem = kickoffError(kickoff);
  const used = countCodePoints(kickoff);
  const submittable =
    Object.keys(errors).length === 0 && kickoffProblem === null;
  const check: FormCheck = {
    errors,
    kickoffError: kickoffProblem,
    counter: { used, limit: PLATFORM_LIMIT, over: used > PLATFORM_LIMIT },
    submittable,
  };
  if (submittable) {
    check.request = {
      name: fields.name.trim(),
      rationale: fields.rationale,
      hashtag: normalizeHashtag(fields.hashtag),
      selection_deadline: toRfc3339(fields.selection_deadline),
      execution_time: toRfc3339(fields.execution_time),
      creator: fields.creator.trim(),
      kickoff_text: kickoff,
    };
  }
  return check;
}

function toRfc3339(local: string): string {
  return new Date(local).toISOString().replace(/\.000Z$/, "Z");
}
