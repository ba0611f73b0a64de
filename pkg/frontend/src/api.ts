import type { ClassifyRequest, ClassifyResponse, HealthResponse, SynthResponse } from "./types.js";

export class ServiceError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

type FetchLike = typeof fetch;

/** Thin typed client over the HTTP service; the fetch implementation is
 * injectable so tests can run without a network. */
export class ServiceClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const body = (await resp.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        /* non-JSON error body */
      }
      throw new ServiceError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  classify(req: ClassifyRequest): Promise<ClassifyResponse> {
    return this.request<ClassifyResponse>("/v1/classify", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    });
  }

  synth(type: string, seed: number): Promise<SynthResponse> {
    const q = new URLSearchParams({ type, seed: String(seed) });
    return this.request<SynthResponse>(`/v1/synth?${q}`);
  }

  synthTypes(): Promise<{ types: string[] }> {
    return this.request<{ types: string[] }>("/v1/synth/types");
  }

  health(): Promise<HealthResponse> {
    return this.request<HealthResponse>("/healthz");
  }
}
