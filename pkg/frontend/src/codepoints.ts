/** Feed messages count NFC code points, not UTF-16 units. */

export const PLATFORM_LIMIT = 140;

export function countCodePoints(text: string): number {
  return Array.from(text.normalize("NFC")).length;
}

export function overLimit(text: string, limit = PLATFORM_LIMIT): boolean {
  return countCodePoints(text) > limit;
}
