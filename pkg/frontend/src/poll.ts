/** Fixed-interval polling with at most one request in flight.
 *
 * A tick that fires while the previous request is still running is
 * skipped; failures raise an offline flag and polling simply continues.
 */

export const POLL_INTERVAL_MS = 5000;

type Fetcher = () => Promise<void>;

export class Poller {
  offline = false;
  private timer: ReturnType<typeof setInterval> | null = null;
  private inFlight = false;

  constructor(
    private readonly fetcher: Fetcher,
    private readonly intervalMs: number = POLL_INTERVAL_MS,
  ) {}

  start(): void {
    if (this.timer !== null) return;
    void this.tick();
    this.timer = setInterval(() => void this.tick(), this.intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  async tick(): Promise<void> {
    if (this.inFlight) return;
    this.inFlight = true;
    try {
      await this.fetcher();
      this.offline = false;
    } catch {
      this.offline = true;
    } finally {
      this.inFlight = false;
    }
  }
}
