/** Client-side ticker for the server's seconds_to_next_stage.
 *
 * The server value is only refreshed every poll; between polls we count
 * down locally from the moment the view arrived, which keeps the display
 * within a second or two of the truth on synchronized clocks.
 */

export class CountdownTicker {
  private seconds: number | null = null;
  private syncedAtMs = 0;

  sync(seconds: number | undefined | null, nowMs: number): void {
    this.seconds = seconds ?? null;
    this.syncedAtMs = nowMs;
  }

  /** Remaining whole seconds, or null when the mission is terminal. */
  remaining(nowMs: number): number | null {
    if (this.seconds === null) return null;
    const elapsed = Math.floor((nowMs - this.syncedAtMs) / 1000);
    return Math.max(0, this.seconds - elapsed);
  }

  /** True once the countdown has hit zero but no new phase arrived yet. */
  transitionPending(nowMs: number): boolean {
    return this.remaining(nowMs) === 0;
  }
}

export function formatCountdown(totalSeconds: number): string {
  const days = Math.floor(totalSeconds / 86400);
  const hours = Math.floor((totalSeconds % 86400) / 3600);
  const minutes = Math.floor((totalSeconds % 3600) / 60);
  const seconds = totalSeconds % 60;
  const mmss = `${pad(minutes)}:${pad(seconds)}`;
  if (days > 0) return `${days}d ${hours}h ${mmss}`;
  if (hours > 0) return `${hours}h ${mmss}`;
  return mmss;
}

function pad(n: number): string {
  return n.toString().padStart(2, "0");
}
