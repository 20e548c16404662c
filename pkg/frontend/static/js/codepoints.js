/** Feed messages count NFC code points, not UTF-16 units. */
export const PLATFORM_LIMIT = 140;
export function countCodePoints(text) {
    return Array.from(text.normalize("NFC")).length;
}
export function overLimit(text, limit = PLATFORM_LIMIT) {
    return countCodePoints(text) > limit;
}
