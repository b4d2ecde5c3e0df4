// Typed client for the matching service. The fetch implementation is
// injectable so tests can run without a server.

export interface TransformJson {
  theta: number;
  tx: number;
  ty: number;
}

export interface AlignmentJson {
  transform: TransformJson;
  objective: number;
  selection_score: number;
  direction: string;
  start_used: string;
  rate_used: number;
  iterations: number;
  converged: boolean;
}

export type JobStatus = "queued" | "aligning" | "featurizing" | "done" | "failed";

export interface PairJobJson {
  job_id: string;
  status: JobStatus;
  model_id: string;
  alignment: AlignmentJson | null;
  features: Record<string, number | null> | null;
  posterior: number | null;
  error: string | null;
  error_code: string | null;
  q_points: [number, number][] | null;
  k_star_points: [number, number][] | null;
}

export interface KdeCurve {
  x: number[];
  y: number[];
  degenerate?: boolean;
}

export interface PopulationSide {
  histogram: { counts: number[]; bin_edges: number[] };
  kde: KdeCurve;
  n: number;
}

export interface PopulationJson {
  metric: string;
  scenario: string | null;
  mated: PopulationSide;
  non_mated: PopulationSide;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function errorDetail(resp: Response): Promise<string> {
  try {
    const body = await resp.json();
    return typeof body.detail === "string" ? body.detail : JSON.stringify(body);
  } catch {
    return resp.statusText;
  }
}

export class ApiClient {
  constructor(
    private doFetch: FetchLike = (input, init) => fetch(input, init),
    private base: string = "",
  ) {}

  async createPair(qImage: File | Blob, kImage: File | Blob, modelId?: string): Promise<string> {
    const form = new FormData();
    form.append("q_image", qImage, "q.png");
    form.append("k_image", kImage, "k.png");
    if (modelId) form.append("model_id", modelId);
    const resp = await this.doFetch(`${this.base}/api/pairs`, { method: "POST", body: form });
    if (resp.status !== 202) throw new ApiError(resp.status, await errorDetail(resp));
    const body = await resp.json();
    return body.job_id as string;
  }

  async getPair(jobId: string): Promise<PairJobJson> {
    const resp = await this.doFetch(`${this.base}/api/pairs/${encodeURIComponent(jobId)}`);
    if (!resp.ok) throw new ApiError(resp.status, await errorDetail(resp));
    return (await resp.json()) as PairJobJson;
  }

  async getPopulation(metric: string, scenario?: string): Promise<PopulationJson> {
    const query = scenario ? `?scenario=${encodeURIComponent(scenario)}` : "";
    const resp = await this.doFetch(`${this.base}/api/population/${encodeURIComponent(metric)}${query}`);
    if (!resp.ok) throw new ApiError(resp.status, await errorDetail(resp));
    return (await resp.json()) as PopulationJson;
  }
}
