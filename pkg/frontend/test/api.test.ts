import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

describe("ApiClient", () => {
  it("tags requests with increasing sequence numbers", () => {
    const client = new ApiClient("/api/v1", async () => jsonResponse({}));
    expect(client.nextSeq()).toBe(1);
    expect(client.nextSeq()).toBe(2);
    expect(client.nextSeq()).toBe(3);
  });

  it("discards stale responses: last write wins per slot", async () => {
    const client = new ApiClient("/api/v1", async () => jsonResponse({}));
    let releaseFirst!: () => void;
    const firstGate = new Promise<void>((resolve) => { releaseFirst = resolve; });

    const first = client.latest("metrics", async () => {
      await firstGate;
      return "old";
    });
    const second = client.latest("metrics", async () => "new");

    expect(await second).toBe("new");
    releaseFirst();
    expect(await first).toBeNull(); // outdated by the second request
  });

  it("keeps responses for distinct slots independent", async () => {
    const client = new ApiClient("/api/v1", async () => jsonResponse({}));
    const a = await client.latest("metrics", async () => "m");
    const b = await client.latest("compare", async () => "c");
    expect(a).toBe("m");
    expect(b).toBe("c");
  });

  it("raises ApiError with the service's error name", async () => {
    const client = new ApiClient("/api/v1", async () =>
      jsonResponse({ error: "UnknownFeature", message: "no such feature" }, 404));
    await expect(client.getDistribution("s", "nope")).rejects.toMatchObject({
      status: 404,
      error: "UnknownFeature",
    });
    await expect(client.getDistribution("s", "nope")).rejects.toBeInstanceOf(ApiError);
  });

  it("sends JSON bodies for mutating calls", async () => {
    const seen: { url: string; init?: RequestInit }[] = [];
    const client = new ApiClient("/api/v1", async (url, init) => {
      seen.push({ url, init });
      return jsonResponse({ subgroups: [] });
    });
    await client.generateGroups("s1", [{ feature: "sex" }], "Guidance");
    expect(seen[0].url).toBe("/api/v1/sessions/s1/groups");
    expect(JSON.parse(String(seen[0].init?.body))).toEqual({
      selections: [{ feature: "sex" }],
      stage: "Guidance",
    });
  });
});
