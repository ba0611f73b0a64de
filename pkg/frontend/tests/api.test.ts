import { describe, expect, it } from "vitest";

import { ServiceClient, ServiceError } from "../src/api.js";

function fakeFetch(status: number, body: unknown) {
  const calls: { url: string; init?: RequestInit }[] = [];
  const impl = (async (url: string, init?: RequestInit) => {
    calls.push({ url, init });
    return {
      ok: status >= 200 && status < 300,
      status,
      statusText: `status ${status}`,
      json: async () => body,
    } as Response;
  }) as typeof fetch;
  return { impl, calls };
}

describe("ServiceClient", () => {
  it("posts classify requests with the wire schema", async () => {
    const { impl, calls } = fakeFetch(200, {
      label: "human", score: 0.8, n_lognormals: 1, features: {},
      decomposition: [], latency_ms: 3,
    });
    const client = new ServiceClient("http://svc:8000", impl);
    const resp = await client.classify({ points: [[0, 0, 0], [1, 1, 5]] });
    expect(resp.label).toBe("human");
    expect(calls[0].url).toBe("http://svc:8000/v1/classify");
    expect(calls[0].init?.method).toBe("POST");
    const sent = JSON.parse(String(calls[0].init?.body));
    expect(sent.points).toEqual([[0, 0, 0], [1, 1, 5]]);
  });

  it("builds synth query parameters", async () => {
    const { impl, calls } = fakeFetch(200, { type: "linear_vp1", seed: 3, points: [] });
    const client = new ServiceClient("http://svc", impl);
    await client.synth("linear_vp1", 3);
    expect(calls[0].url).toBe("http://svc/v1/synth?type=linear_vp1&seed=3");
  });

  it("raises ServiceError with the server detail", async () => {
    const { impl } = fakeFetch(404, { detail: "unknown attack tag" });
    const client = new ServiceClient("http://svc", impl);
    await expect(client.synth("warp", 1)).rejects.toThrowError(ServiceError);
    await expect(client.synth("warp", 1)).rejects.toThrow("unknown attack tag");
  });

  it("fetches health", async () => {
    const { impl, calls } = fakeFetch(200, { status: "ok", model_version: "abc", uptime_s: 1 });
    const client = new ServiceClient("http://svc", impl);
    const health = await client.health();
    expect(health.status).toBe("ok");
    expect(calls[0].url).toBe("http://svc/healthz");
  });
});
