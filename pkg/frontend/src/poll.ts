// Job polling: fixed 1s cadence while the job is running, exponential
// backoff after transient network failures, one active poll per job.

import type { ApiClient, PairJobJson } from "./api.js";

export interface PollOptions {
  intervalMs?: number;
  maxBackoffMs?: number;
  maxNetworkFailures?: number;
  sleep?: (ms: number) => Promise<void>;
}

export function backoffDelays(base: number, cap: number, attempts: number): number[] {
  const delays: number[] = [];
  for (let i = 0; i < attempts; i++) {
    delays.push(Math.min(base * 2 ** i, cap));
  }
  return delays;
}

const defaultSleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export async function pollJob(
  client: ApiClient,
  jobId: string,
  onUpdate: (job: PairJobJson) => void,
  options: PollOptions = {},
): Promise<PairJobJson> {
  const interval = options.intervalMs ?? 1000;
  const cap = options.maxBackoffMs ?? 8000;
  const maxFailures = options.maxNetworkFailures ?? 5;
  const sleep = options.sleep ?? defaultSleep;

  let failures = 0;
  for (;;) {
    let job: PairJobJson;
    try {
      job = await client.getPair(jobId);
      failures = 0;
    } catch (err) {
      failures += 1;
      if (failures > maxFailures) throw err;
      await sleep(backoffDelays(interval, cap, failures)[failures - 1]);
      continue;
    }
    onUpdate(job);
    if (job.status === "done" || job.status === "failed") return job;
    await sleep(interval);
  }
}
