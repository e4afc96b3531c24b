/** Client for the audit service API.
 *
 * Every request carries a monotonically increasing sequence number; the
 * `latest` helper drops responses that arrive after a newer request for the
 * same slot, so concurrent refreshes resolve last-write-wins.
 */

import type {
  CompareResponse,
  DatasetSummary,
  EvaluationResult,
  GroupSetInfo,
  Histogram,
  MetricsResponse,
  NodeDescription,
  SessionState,
  SimilarEntry,
  SubgroupInfo,
  SuggestionEntry,
  TreeDocument,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly error: string,
    message: string,
  ) {
    super(message);
  }
}

export interface Tagged<T> {
  seq: number;
  data: T;
}

export class ApiClient {
  private seq = 0;
  private newest: Record<string, number> = {};

  constructor(
    private readonly base: string = "/api/v1",
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  nextSeq(): number {
    this.seq += 1;
    return this.seq;
  }

  /** Resolve to null when a newer request for `slot` started meanwhile. */
  async latest<T>(slot: string, run: () => Promise<T>): Promise<T | null> {
    const seq = this.nextSeq();
    this.newest[slot] = seq;
    const data = await run();
    if (this.newest[slot] !== seq) {
      return null; // stale response discarded
    }
    return data;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.base + path, init);
    const payload = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, payload.error ?? "Error",
        payload.message ?? response.statusText);
    }
    return payload as T;
  }

  getDataset(datasetId: string): Promise<DatasetSummary> {
    return this.request("GET", `/datasets/${datasetId}`);
  }

  getDistribution(sessionId: string, feature: string): Promise<Histogram> {
    return this.request("GET",
      `/sessions/${sessionId}/distribution?feature=${encodeURIComponent(feature)}`);
  }

  getSession(sessionId: string): Promise<SessionState> {
    return this.request("GET", `/sessions/${sessionId}`);
  }

  createSession(datasetId: string, sessionId?: string): Promise<SessionState> {
    return this.request("POST", "/sessions",
      { dataset_id: datasetId, session_id: sessionId ?? null });
  }

  generateGroups(
    sessionId: string,
    selections: { feature: string; values?: (string | number)[] | null }[],
    stage = "Exploration",
  ): Promise<{ subgroups: SubgroupInfo[] }> {
    return this.request("POST", `/sessions/${sessionId}/groups`,
      { selections, stage });
  }

  getMetrics(sessionId: string, rates: string[]): Promise<MetricsResponse> {
    const query = rates.length ? `?rates=${rates.join(",")}` : "";
    return this.request("GET", `/sessions/${sessionId}/metrics${query}`);
  }

  pin(sessionId: string, subgroupId: string): Promise<{ pinned: SubgroupInfo }> {
    return this.request("POST", `/sessions/${sessionId}/pin`,
      { subgroup_id: subgroupId });
  }

  compare(sessionId: string, hoveredId: string): Promise<CompareResponse> {
    return this.request("GET",
      `/sessions/${sessionId}/compare?hovered=${encodeURIComponent(hoveredId)}`);
  }

  saveGroupSet(sessionId: string, name: string): Promise<GroupSetInfo> {
    return this.request("POST", `/sessions/${sessionId}/group-sets`, { name });
  }

  restoreGroupSet(sessionId: string, groupSetId: string):
      Promise<{ subgroups: SubgroupInfo[] }> {
    return this.request("POST",
      `/sessions/${sessionId}/group-sets/${groupSetId}/restore`, {});
  }

  getSuggestions(sessionId: string, rate: string, k?: number, seed?: number):
      Promise<{ suggestions: SuggestionEntry[] }> {
    const params = new URLSearchParams({ rate });
    if (k !== undefined) params.set("k", String(k));
    if (seed !== undefined) params.set("seed", String(seed));
    return this.request("GET", `/sessions/${sessionId}/suggestions?${params}`);
  }

  getSimilar(sessionId: string, targetId: string):
      Promise<{ similar: SimilarEntry[] }> {
    return this.request("GET",
      `/sessions/${sessionId}/similar?target=${encodeURIComponent(targetId)}`);
  }

  getTree(): Promise<TreeDocument> {
    return this.request("GET", "/tree");
  }

  describeNode(nodeId: string): Promise<NodeDescription> {
    return this.request("GET", `/tree/nodes/${encodeURIComponent(nodeId)}`);
  }

  navigate(sessionId: string, nodeId: string, answer: string): Promise<{
    node: { id: string; kind: string; text: string; answers: string[];
            definition_id: string | null };
    tree_path: [string, string][];
    selected_definition: string | null;
  }> {
    return this.request("POST", `/sessions/${sessionId}/tree/navigate`,
      { node_id: nodeId, answer });
  }

  backtrack(sessionId: string, steps = 1): Promise<{
    frontier: string;
    tree_path: [string, string][];
    selected_definition: string | null;
  }> {
    return this.request("POST", `/sessions/${sessionId}/tree/backtrack`, { steps });
  }

  evaluate(sessionId: string, inputs: Record<string, unknown>):
      Promise<{ result: EvaluationResult }> {
    return this.request("POST", `/sessions/${sessionId}/evaluate`, { inputs });
  }

  logStage(sessionId: string, stage: string, action: string,
           payload: Record<string, unknown> = {}, note?: string): Promise<unknown> {
    return this.request("POST", `/sessions/${sessionId}/log`,
      { stage, action, payload, note: note ?? null });
  }
}
