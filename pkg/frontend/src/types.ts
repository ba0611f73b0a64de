// Wire types of the classification service (v1).

export type PointRow = [number, number, number]; // x px, y px, t ms

export interface ClassifyRequest {
  points: PointRow[];
  feature_set?: string;
}

export interface StrokeParams {
  D: number;
  t0: number;
  mu: number;
  sigma: number;
  theta_s: number;
  theta_e: number;
}

export interface ClassifyResponse {
  label: "human" | "bot";
  score: number;
  n_lognormals: number;
  features: Record<string, number>;
  decomposition: StrokeParams[];
  latency_ms: number;
}

export interface SynthResponse {
  type: string;
  seed: number;
  points: PointRow[];
}

export interface HealthResponse {
  status: "ok" | "degraded";
  model_version: string | null;
  uptime_s: number;
}
