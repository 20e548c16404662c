import { describe, expect, it } from "vitest";

import { CountdownTicker, formatCountdown } from "../src/countdown.js";

describe("CountdownTicker", () => {
  it("tracks the server value within a second on synced clocks", () => {
    const ticker = new CountdownTicker();
    ticker.sync(5400, 1_000_000);
    // 90 minutes before the stage flips, 37 seconds after the poll
    expect(ticker.remaining(1_000_000 + 37_000)).toBe(5400 - 37);
    const drift = Math.abs(ticker.remaining(1_000_000 + 37_400)! - (5400 - 37));
    expect(drift).toBeLessThanOrEqual(2);
  });

  it("floors at zero and reports a pending transition", () => {
    const ticker = new CountdownTicker();
    ticker.sync(3, 0);
    expect(ticker.remaining(10_000)).toBe(0);
    expect(ticker.transitionPending(10_000)).toBe(true);
    expect(ticker.transitionPending(1_000)).toBe(false);
  });

  it("is null for terminal missions", () => {
    const ticker = new CountdownTicker();
    ticker.sync(undefined, 0);
    expect(ticker.remaining(99_000)).toBeNull();
    expect(ticker.transitionPending(99_000)).toBe(false);
  });

  it("resyncs on every poll instead of accumulating drift", () => {
    const ticker = new CountdownTicker();
    ticker.sync(100, 0);
    ticker.sync(95, 5_000);
    expect(ticker.remaining(6_000)).toBe(94);
  });
});

describe("formatCountdown", () => {
  it("renders compact units", () => {
    expect(formatCountdown(59)).toBe("00:59");
    expect(formatCountdown(3 * 3600 + 4 * 60 + 5)).toBe("3h 04:05");
    expect(formatCountdown(2 * 86400 + 3600)).toBe("2d 1h 00:00");
  });
});
