/** Typed client for the inspection service (all routes under /api/v1). */

export interface FeatureMeta {
  name: string;
  index: number;
  kind: "numeric" | "binary";
  min: number | null;
  max: number | null;
  grid_size: number;
  feasible: number[] | null;
  weight: number | null;
}

export interface MetaResponse {
  n_rows: number;
  model: string;
  seed: number;
  features: FeatureMeta[];
}

export interface HistogramData {
  bin_edges: number[];
  counts: number[];
}

export interface PdpResponse {
  feature: string;
  grid: number[];
  values: number[];
  histogram: HistogramData;
}

export interface ImpactfulEntry {
  feature: string;
  current_value: number;
  suggested_value: number;
  delta: number;
  direction: "increase" | "decrease";
}

export interface WhatIfRequest {
  values: Record<string, number>;
  row?: number;
  objective?: "increase" | "decrease";
}

export interface WhatIfResponse {
  evaluated: number[];
  score: number;
  importance: Record<string, number>;
  impactful: ImpactfulEntry[];
}

export interface CurvesResponse {
  thresholds: number[];
  tpr: number[];
  fpr: number[];
  precision: number[];
  recall: number[];
  accuracy: number[];
  auc: number;
}

export interface ContingencyResponse {
  tp: number;
  fp: number;
  tn: number;
  fn: number;
}

export interface SignaturesRequest {
  tau_pos: number;
  tau_neg: number;
  k_pos?: number | "auto";
  k_neg?: number | "auto";
}

export interface ClusterEntry {
  side: "positive" | "negative";
  members: number[];
  presence: number[];
  label_mix: number;
}

export interface SignaturesResponse {
  clusters: ClusterEntry[];
  discriminativeness: number[][];
  projection: number[][];
  retained: number[];
  thresholds: { tau_pos: number; tau_neg: number };
  k_pos: number;
  k_neg: number;
  seed: number;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

async function asJson<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = (await resp.json()) as { error?: string };
      if (body.error) detail = body.error;
    } catch {
      // non-JSON error body: keep the status text
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

export class ApiClient {
  constructor(public readonly baseUrl: string) {}

  private url(path: string): string {
    return `${this.baseUrl}/api/v1${path}`;
  }

  getMeta(): Promise<MetaResponse> {
    return fetch(this.url("/meta")).then((r) => asJson<MetaResponse>(r));
  }

  getPdp(feature: string): Promise<PdpResponse> {
    return fetch(this.url(`/pdp/${encodeURIComponent(feature)}`)).then((r) =>
      asJson<PdpResponse>(r),
    );
  }

  postWhatIf(req: WhatIfRequest): Promise<WhatIfResponse> {
    return fetch(this.url("/whatif"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    }).then((r) => asJson<WhatIfResponse>(r));
  }

  getCurves(): Promise<CurvesResponse> {
    return fetch(this.url("/curves")).then((r) => asJson<CurvesResponse>(r));
  }

  getContingency(t: number): Promise<ContingencyResponse> {
    return fetch(this.url(`/contingency?t=${t}`)).then((r) =>
      asJson<ContingencyResponse>(r),
    );
  }

  postSignatures(req: SignaturesRequest): Promise<SignaturesResponse> {
    return fetch(this.url("/signatures"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    }).then((r) => asJson<SignaturesResponse>(r));
  }
}
