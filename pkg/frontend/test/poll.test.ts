import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { Poller } from "../src/poll.js";

describe("Poller", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("polls immediately and then every interval", async () => {
    let calls = 0;
    const poller = new Poller(async () => {
      calls += 1;
    }, 5000);
    poller.start();
    await vi.advanceTimersByTimeAsync(0);
    expect(calls).toBe(1);
    await vi.advanceTimersByTimeAsync(10_000);
    expect(calls).toBe(3);
    poller.stop();
    await vi.advanceTimersByTimeAsync(10_000);
    expect(calls).toBe(3);
  });

  it("keeps at most one request in flight", async () => {
    let inFlight = 0;
    let peak = 0;
    const poller = new Poller(async () => {
      inFlight += 1;
      peak = Math.max(peak, inFlight);
      await new Promise((resolve) => setTimeout(resolve, 12_000));
      inFlight -= 1;
    }, 5000);
    poller.start();
    await vi.advanceTimersByTimeAsync(25_000);
    poller.stop();
    expect(peak).toBe(1);
  });

  it("a phase flip on the server is visible within two polls", async () => {
    // server state flips between poll 1 and poll 2; the model the
    // fetcher maintains must reflect it by the second interval
    let serverPhase = "Voting";
    let seenPhase = "";
    const poller = new Poller(async () => {
      seenPhase = serverPhase;
    }, 5000);
    poller.start();
    await vi.advanceTimersByTimeAsync(0);
    expect(seenPhase).toBe("Voting");
    serverPhase = "Planning";
    await vi.advanceTimersByTimeAsync(10_000); // two poll intervals
    expect(seenPhase).toBe("Planning");
    poller.stop();
  });

  it("raises and clears the offline flag", async () => {
    let fail = true;
    const poller = new Poller(async () => {
      if (fail) throw new Error("down");
    }, 5000);
    poller.start();
    await vi.advanceTimersByTimeAsync(0);
    expect(poller.offline).toBe(true);
    fail = false;
    await vi.advanceTimersByTimeAsync(5_000);
    expect(poller.offline).toBe(false);
    poller.stop();
  });
});
