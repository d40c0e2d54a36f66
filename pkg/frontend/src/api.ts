import type {
  DatasetInfo,
  DebiasResponse,
  DistributionSummary,
  EditRequest,
  EditResponse,
  EvaluateResponse,
  GraphModel,
  GroupSpecJson,
  LogsView,
  PathsResponse,
  SessionInfo,
  Stage,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly kind: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client; every non-2xx response surfaces as an ApiError with
 * the server's error kind and message. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchImpl(this.baseUrl + path, init);
    const text = await resp.text();
    const body = text ? JSON.parse(text) : {};
    if (!resp.ok) {
      throw new ApiError(resp.status, body.error ?? "error", body.message ?? text);
    }
    return body as T;
  }

  uploadDataset(
    csvText: string,
    label: string,
    nominal: string[] = [],
    ordinal: string[] = [],
  ): Promise<DatasetInfo> {
    const params = new URLSearchParams({
      label,
      nominal: nominal.join(","),
      ordinal: ordinal.join(","),
    });
    return this.request(`/datasets?${params}`, {
      method: "POST",
      headers: { "content-type": "text/csv" },
      body: csvText,
    });
  }

  createSession(datasetId: string, pThreshold = 0.01, excludeLabel = false): Promise<SessionInfo> {
    return this.request("/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        dataset_id: datasetId,
        p_threshold: pThreshold,
        exclude_label: excludeLabel,
      }),
    });
  }

  getModel(sessionId: string): Promise<GraphModel> {
    return this.request(`/sessions/${sessionId}/model`);
  }

  setStage(sessionId: string, stage: Stage): Promise<{ ok: boolean; stage: Stage }> {
    return this.request(`/sessions/${sessionId}/stage`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ stage }),
    });
  }

  applyEdit(sessionId: string, edit: EditRequest): Promise<EditResponse> {
    return this.request(`/sessions/${sessionId}/edits`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(edit),
    });
  }

  getPaths(sessionId: string, source: string, target: string): Promise<PathsResponse> {
    const params = new URLSearchParams({ source, target });
    return this.request(`/sessions/${sessionId}/paths?${params}`);
  }

  getNodeDistribution(sessionId: string, node: string): Promise<DistributionSummary> {
    return this.request(`/sessions/${sessionId}/distributions?${new URLSearchParams({ node })}`);
  }

  getEdgeDistribution(sessionId: string, src: string, dst: string): Promise<DistributionSummary> {
    const params = new URLSearchParams({ edge: `${src},${dst}` });
    return this.request(`/sessions/${sessionId}/distributions?${params}`);
  }

  runDebias(sessionId: string, seed: number): Promise<DebiasResponse> {
    return this.request(`/sessions/${sessionId}/debias`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ seed }),
    });
  }

  evaluate(
    sessionId: string,
    groups: GroupSpecJson,
    opts: { k?: number; seed?: number; favorable?: string } = {},
  ): Promise<EvaluateResponse> {
    return this.request(`/sessions/${sessionId}/evaluate`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ groups, classifier: "logistic", ...opts }),
    });
  }

  getLogs(sessionId: string): Promise<LogsView> {
    return this.request(`/sessions/${sessionId}/logs`);
  }

  debiasedCsvUrl(sessionId: string): string {
    return `${this.baseUrl}/sessions/${sessionId}/debiased.csv`;
  }
}
