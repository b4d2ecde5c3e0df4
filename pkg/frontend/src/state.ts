// Pair view state: everything rendered comes straight from the server
// payload; the only client-side computation is the threshold comparison.

import type { PairJobJson } from "./api.js";

export type Decision = "mated" | "non-mated";

export interface PairViewState {
  phase: "idle" | "uploading" | "running" | "done" | "failed";
  job: PairJobJson | null;
  threshold: number;
  errorMessage: string | null;
}

export function initialState(): PairViewState {
  return { phase: "idle", job: null, threshold: 0.5, errorMessage: null };
}

export function decisionLabel(posterior: number, threshold: number): Decision {
  // the decision flips exactly at the threshold: at-or-above means mated
  return posterior >= threshold ? "mated" : "non-mated";
}

export function applyJobUpdate(state: PairViewState, job: PairJobJson): PairViewState {
  if (job.status === "done") {
    return { ...state, phase: "done", job, errorMessage: null };
  }
  if (job.status === "failed") {
    return { ...state, phase: "failed", job, errorMessage: job.error_code ?? job.error ?? "failed" };
  }
  return { ...state, phase: "running", job };
}

export function applyUploadError(state: PairViewState, message: string): PairViewState {
  return { ...state, phase: "failed", job: null, errorMessage: message };
}

export function metricEntries(job: PairJobJson): [string, number | null][] {
  if (!job.features) return [];
  return Object.entries(job.features);
}

export function presentMetricCount(job: PairJobJson): number {
  return metricEntries(job).filter(([, v]) => v !== null).length;
}
