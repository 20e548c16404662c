/** Fixed-interval polling with at most one request in flight.
 *
 * A tick that fires while the previous request is still running is
 * skipped; failures raise an offline flag and polling simply continues.
 */
export const POLL_INTERVAL_MS = 5000;
export class Poller {
    constructor(fetcher, intervalMs = POLL_INTERVAL_MS) {
        this.fetcher = fetcher;
        this.intervalMs = intervalMs;
        this.offline = false;
        this.timer = null;
        this.inFlight = false;
    }
    start() {
        if (this.timer !== null)
            return;
        void this.tick();
        this.timer = setInterval(() => void this.tick(), this.intervalMs);
    }
    stop() {
        if (this.timer !== null) {
            clearInterval(this.timer);
            this.timer = null;
        }
    }
    async tick() {
        if (this.inFlight)
            return;
        this.inFlight = true;
        try {
            await this.fetcher();
            this.offline = false;
        }
        catch {
            this.offline = true;
        }
        finally {
            this.inFlight = false;
        }
    }
}
