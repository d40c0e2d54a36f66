import { ApiClient, ApiError } from "./api.js";
import type {
  DatasetInfo,
  EditRequest,
  EvaluateResponse,
  GraphModel,
  GroupSpecJson,
  LogsView,
  Stage,
} from "./types.js";

/** UI-side session state. The graph model is replaced only by acknowledged
 * server responses; a rejected mutation leaves it untouched and records the
 * server's message instead. Holding just (datasetInfo, sessionId, last
 * responses) keeps the page reconstructable from a reload + refetch. */
export class SessionState {
  dataset: DatasetInfo | null = null;
  sessionId: string | null = null;
  model: GraphModel | null = null;
  lastBicDelta = 0;
  lastError: { status: number; message: string } | null = null;
  lastEvaluation: EvaluateResponse | null = null;
  lastLogs: LogsView | null = null;
  debiasSeed = 0;

  constructor(private readonly client: ApiClient) {}

  async start(csvText: string, label: string, nominal: string[], ordinal: string[], p = 0.01) {
    this.dataset = await this.client.uploadDataset(csvText, label, nominal, ordinal);
    const session = await this.client.createSession(this.dataset.dataset_id, p);
    this.sessionId = session.session_id;
    this.model = session.model;
    this.lastError = null;
    return session;
  }

  async resume(sessionId: string) {
    this.sessionId = sessionId;
    this.model = await this.client.getModel(sessionId);
  }

  private requireSession(): string {
    if (!this.sessionId) throw new Error("no active session");
    return this.sessionId;
  }

  /** Apply an edit; on rejection (409 and friends) the current model stays
   * bit-identical and the error is surfaced for the toast. */
  async applyEdit(edit: EditRequest): Promise<boolean> {
    const sid = this.requireSession();
    try {
      const resp = await this.client.applyEdit(sid, edit);
      this.model = resp.model;
      this.lastBicDelta = resp.bic_delta;
      this.lastError = null;
      return true;
    } catch (err) {
      if (err instanceof ApiError) {
        this.lastError = { status: err.status, message: err.message };
        return false;
      }
      throw err;
    }
  }

  async setStage(stage: Stage) {
    const sid = this.requireSession();
    await this.client.setStage(sid, stage);
    this.model = await this.client.getModel(sid);
    this.lastError = null;
  }

  async runDebias(seed: number) {
    const sid = this.requireSession();
    this.debiasSeed = seed;
    return this.client.runDebias(sid, seed);
  }

  async evaluate(groups: GroupSpecJson, opts: { k?: number; seed?: number; favorable?: string } = {}) {
    const sid = this.requireSession();
    this.lastEvaluation = await this.client.evaluate(sid, groups, opts);
    return this.lastEvaluation;
  }

  async refreshLogs() {
    const sid = this.requireSession();
    this.lastLogs = await this.client.getLogs(sid);
    return this.lastLogs;
  }

  findPaths(source: string, target: string) {
    return this.client.getPaths(this.requireSession(), source, target);
  }

  nodeDistribution(node: string) {
    return this.client.getNodeDistribution(this.requireSession(), node);
  }

  edgeDistribution(src: string, dst: string) {
    return this.client.getEdgeDistribution(this.requireSession(), src, dst);
  }

  downloadUrl(): string {
    return this.client.debiasedCsvUrl(this.requireSession());
  }
}

export interface WalkthroughStep {
  action: string;
  parityOriginal?: number;
  parityDebiased?: number;
  distortion?: number;
  fourfoldOriginal?: Record<string, number>;
  fourfoldDebiased?: Record<string, number>;
  bicDelta?: number;
  errorMessage?: string;
}

/** Scripted hiring-scenario walkthrough. Each evaluation snapshot records
 * exactly the numbers the dashboards would render, so tests can compare
 * them verbatim against the raw service responses. */
export async function runScriptedWalkthrough(
  state: SessionState,
  csvText: string,
  refineEdits: EditRequest[],
  debiasDeletes: [string, string][],
  groups: GroupSpecJson,
  opts: { favorable?: string; seed?: number; label: string; nominal: string[] },
): Promise<WalkthroughStep[]> {
  const steps: WalkthroughStep[] = [];
  await state.start(csvText, opts.label, opts.nominal, []);
  steps.push({ action: "session" });

  for (const edit of refineEdits) {
    const ok = await state.applyEdit(edit);
    steps.push({
      action: `refine:${edit.op}:${edit.src}->${edit.dst}`,
      bicDelta: ok ? state.lastBicDelta : undefined,
      errorMessage: ok ? undefined : state.lastError?.message,
    });
  }

  await state.setStage("debias");
  for (const [src, dst] of debiasDeletes) {
    await state.applyEdit({ op: "delete", src, dst });
    await state.runDebias(opts.seed ?? 0);
    const report = await state.evaluate(groups, {
      seed: opts.seed ?? 0,
      favorable: opts.favorable,
    });
    steps.push({
      action: `debias:delete:${src}->${dst}`,
      parityOriginal: report.original.parity_diff,
      parityDebiased: report.debiased.parity_diff,
      distortion: report.debiased.distortion,
      fourfoldOriginal: report.original.fourfold.percent,
      fourfoldDebiased: report.debiased.fourfold.percent,
    });
  }
  return steps;
}
