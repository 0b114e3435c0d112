/** Request pacing: debounced triggers and latest-wins response gating.
 *
 * A slider drag produces a stream of values; we keep at most one analytics
 * request in flight per view and apply only the newest response, so stale
 * results can never overwrite fresher state.
 */

export class LatestGate {
  private seq = 0;
  private settled = 0;
  private waiters: (() => void)[] = [];

  /** Run a request; `apply` fires only if no newer request was issued since. */
  async run<T>(request: () => Promise<T>, apply: (value: T) => void, onError?: (err: unknown) => void): Promise<void> {
    const ticket = ++this.seq;
    try {
      const value = await request();
      if (ticket === this.seq) apply(value);
    } catch (err) {
      if (ticket === this.seq && onError) onError(err);
    } finally {
      this.settled = Math.max(this.settled, ticket);
      if (this.settled >= this.seq) {
        const waiters = this.waiters;
        this.waiters = [];
        for (const w of waiters) w();
      }
    }
  }

  /** Resolves once every issued request has settled (for tests). */
  whenIdle(): Promise<void> {
    if (this.settled >= this.seq) return Promise.resolve();
    return new Promise((resolve) => this.waiters.push(resolve));
  }
}

export interface Debounced<A extends unknown[]> {
  (...args: A): void;
  flush(): void;
  pending(): boolean;
}

export function debounce<A extends unknown[]>(fn: (...args: A) => void, waitMs: number): Debounced<A> {
  let timer: ReturnType<typeof setTimeout> | null = null;
  let lastArgs: A | null = null;
  const wrapped = (...args: A) => {
    lastArgs = args;
    if (timer !== null) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = null;
      const a = lastArgs as A;
      lastArgs = null;
      fn(...a);
    }, waitMs);
  };
  wrapped.flush = () => {
    if (timer !== null) {
      clearTimeout(timer);
      timer = null;
      const a = lastArgs as A;
      lastArgs = null;
      fn(...a);
    }
  };
  wrapped.pending = () => timer !== null;
  return wrapped;
}
