/** Application state and the single-in-flight request discipline.
 *
 * Every submission gets a monotonically increasing id; only the response to
 * the newest id is allowed to touch state, so a slow earlier request can
 * never clobber a later edit. */

import {
  type FetchLike,
  type Prediction,
  type Scheme,
  postPredict,
} from "./api.js";

export interface AppState {
  baseline: Prediction | null; // first successful prediction for this patient
  current: Prediction | null;
  pending: boolean;
  error: string | null;
}

export class PredictionStore {
  private state: AppState = {
    baseline: null,
    current: null,
    pending: false,
    error: null,
  };
  private requestSeq = 0;
  private listeners: Array<(s: AppState) => void> = [];
  requestCount = 0; // total requests issued (observable for tests)

  constructor(private fetchFn: FetchLike) {}

  get snapshot(): AppState {
    return this.state;
  }

  subscribe(fn: (s: AppState) => void): void {
    this.listeners.push(fn);
  }

  private set(patch: Partial<AppState>): void {
    this.state = { ...this.state, ...patch };
    for (const fn of this.listeners) fn(this.state);
  }

  /** Score a patient. `asBaseline` marks the response as the reference
   * point for later what-if deltas. */
  async submit(
    features: Record<string, number>,
    scheme: Scheme,
    asBaseline: boolean,
  ): Promise<void> {
    const id = ++this.requestSeq;
    this.requestCount += 1;
    this.set({ pending: true, error: null });
    try {
      const prediction = await postPredict(this.fetchFn, features, scheme);
      if (id !== this.requestSeq) return; // superseded by a newer edit
      this.set({
        current: prediction,
        baseline: asBaseline ? prediction : this.state.baseline,
        pending: false,
      });
    } catch (err) {
      if (id !== this.requestSeq) return;
      this.set({
        pending: false,
        error: err instanceof Error ? err.message : String(err),
      });
    }
  }

  /** Restore the baseline view without a network round trip: the baseline
   * response is replayed verbatim. */
  revertToBaseline(): void {
    if (this.state.baseline) {
      this.set({ current: this.state.baseline, error: null });
    }
  }

  /** Forget everything for a new patient. */
  reset(): void {
    this.requestSeq += 1; // orphan any in-flight response
    this.set({ baseline: null, current: null, pending: false, error: null });
  }
}
