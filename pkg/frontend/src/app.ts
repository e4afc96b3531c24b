/** Application controller: owns the view state, talks to the API, renders.
 *
 * Framework-free by design: actions are async methods, rendering is a pure
 * function of state plus cached API payloads, so the whole flow is testable
 * without a DOM. Every number shown comes from a cached payload; the client
 * never derives metrics itself (complement toggles re-query the service).
 */

import { ApiClient, ApiError } from "./api.js";
import { renderFairnessCompass, renderTabs } from "./compass.js";
import { renderSubgroupExploration } from "./exploration.js";
import { renderFeatureSidebar } from "./sidebar.js";
import {
  initialViewState,
  switchTab,
  syncFromSession,
  toggleSidebar,
  type Tab,
  type ViewState,
} from "./state.js";
import type {
  CompareResponse,
  DatasetSummary,
  EvaluationResult,
  GroupSetInfo,
  Histogram,
  MetricsResponse,
  NodeDescription,
  SimilarEntry,
  SuggestionEntry,
  TreeDocument,
} from "./types.js";

export class App {
  state: ViewState;
  tree: TreeDocument | null = null;
  dataset: DatasetSummary | null = null;
  histograms: Record<string, Histogram> = {};
  groupSets: GroupSetInfo[] = [];
  selectedFeatures: string[] = [];
  metrics: MetricsResponse | null = null;
  suggestions: SuggestionEntry[] = [];
  similar: SimilarEntry[] = [];
  comparison: CompareResponse | null = null;
  description: NodeDescription | null = null;
  result: EvaluationResult | null = null;

  constructor(readonly api: ApiClient, sessionId: string) {
    this.state = initialViewState(sessionId);
  }

  async boot(): Promise<void> {
    this.tree = await this.api.getTree();
    await this.refreshSession();
    this.dataset = (await this.api.getSession(this.state.sessionId)).dataset;
    for (const feature of this.dataset.features) {
      this.histograms[feature.name] =
        await this.api.getDistribution(this.state.sessionId, feature.name);
    }
    await this.refreshMetrics();
  }

  private async guard<T>(work: () => Promise<T>): Promise<T | null> {
    try {
      this.state = { ...this.state, errorMessage: null };
      return await work();
    } catch (error) {
      const message = error instanceof ApiError
        ? `${error.error}: ${error.message}`
        : String(error);
      this.state = { ...this.state, errorMessage: message };
      return null;
    }
  }

  async refreshSession(): Promise<void> {
    const session = await this.api.getSession(this.state.sessionId);
    this.state = syncFromSession(this.state, session);
    this.groupSets = session.saved_group_sets;
  }

  async refreshMetrics(): Promise<void> {
    const payload = await this.api.latest("metrics", () =>
      this.api.getMetrics(this.state.sessionId, this.state.selectedMetrics));
    if (payload !== null) this.metrics = payload;
  }

  // -- sidebar actions -----------------------------------------------------

  async doToggleSidebar(): Promise<void> {
    this.state = toggleSidebar(this.state);
  }

  async doSelectFeature(feature: string, selected: boolean): Promise<void> {
    this.selectedFeatures = selected
      ? [...this.selectedFeatures.filter((f) => f !== feature), feature]
      : this.selectedFeatures.filter((f) => f !== feature);
  }

  async doGenerateGroups(): Promise<void> {
    if (this.selectedFeatures.length === 0) return;
    await this.guard(async () => {
      await this.api.generateGroups(
        this.state.sessionId,
        this.selectedFeatures.map((feature) => ({ feature })),
      );
      this.comparison = null;
      await this.refreshSession();
      await this.refreshMetrics();
    });
  }

  async doSaveGroupSet(name: string): Promise<void> {
    await this.guard(async () => {
      await this.api.saveGroupSet(this.state.sessionId, name);
      await this.refreshSession();
    });
  }

  async doRestoreGroupSet(groupSetId: string): Promise<void> {
    await this.guard(async () => {
      await this.api.restoreGroupSet(this.state.sessionId, groupSetId);
      await this.refreshSession();
      await this.refreshMetrics();
    });
  }

  // -- exploration actions -------------------------------------------------------

  async doToggleMetric(metric: string): Promise<void> {
    const selected = this.state.selectedMetrics.includes(metric)
      ? this.state.selectedMetrics.filter((m) => m !== metric)
      : [...this.state.selectedMetrics, metric];
    this.state = { ...this.state, selectedMetrics: selected };
    await this.refreshMetrics();
  }

  async doPin(subgroupId: string): Promise<void> {
    await this.guard(async () => {
      await this.api.pin(this.state.sessionId, subgroupId);
      await this.refreshSession();
      this.similar = (await this.api.getSimilar(this.state.sessionId, subgroupId)).similar;
    });
  }

  async doHover(subgroupId: string): Promise<void> {
    this.state = { ...this.state, hoveredSubgroupId: subgroupId };
    await this.guard(async () => {
      const payload = await this.api.latest("compare", () =>
        this.api.compare(this.state.sessionId, subgroupId));
      if (payload !== null) this.comparison = payload;
    });
  }

  async doLoadSuggestions(rate: string, seed?: number): Promise<void> {
    await this.guard(async () => {
      const payload = await this.api.latest("suggestions", () =>
        this.api.getSuggestions(this.state.sessionId, rate, undefined, seed));
      if (payload !== null) this.suggestions = payload.suggestions;
    });
  }

  // -- compass actions ----------------------------------------------------------

  async doSwitchTab(tab: Tab): Promise<void> {
    this.state = switchTab(this.state, tab);
  }

  async doSelectNode(nodeId: string): Promise<void> {
    this.state = { ...this.state, selectedNodeId: nodeId };
    await this.guard(async () => {
      this.description = await this.api.describeNode(nodeId);
    });
  }

  async doAnswer(nodeId: string, answer: string): Promise<void> {
    await this.guard(async () => {
      const outcome = await this.api.navigate(this.state.sessionId, nodeId, answer);
      this.state = {
        ...this.state,
        treePath: outcome.tree_path,
        selectedDefinition: outcome.selected_definition,
        selectedNodeId: outcome.node.id,
      };
      this.description = await this.api.describeNode(outcome.node.id);
      if (outcome.node.kind === "leaf") {
        this.result = null; // cleared until the auditor evaluates with inputs
      }
    });
  }

  async doBacktrack(): Promise<void> {
    await this.guard(async () => {
      const outcome = await this.api.backtrack(this.state.sessionId, 1);
      this.state = {
        ...this.state,
        treePath: outcome.tree_path,
        selectedDefinition: outcome.selected_definition,
        selectedNodeId: outcome.frontier,
      };
      this.description = await this.api.describeNode(outcome.frontier);
      this.result = null;
    });
  }

  evaluationInputs(): Record<string, unknown> {
    const required = new Set(this.description?.required_inputs ?? []);
    const inputs: Record<string, unknown> = {};
    if (required.has("favourable_class")) {
      inputs.favourable_class = this.state.favourableClass;
    }
    if (required.has("sensitive_attribute") && this.state.sensitiveAttribute) {
      inputs.sensitive_attribute = this.state.sensitiveAttribute;
    }
    if (required.has("legitimate_attributes") && this.state.legitimateAttributes.length) {
      inputs.legitimate_attributes = this.state.legitimateAttributes;
    }
    return inputs;
  }

  async doEvaluate(): Promise<void> {
    await this.guard(async () => {
      const payload = await this.api.latest("evaluate", () =>
        this.api.evaluate(this.state.sessionId, this.evaluationInputs()));
      if (payload !== null) this.result = payload.result;
    });
  }

  /** Complement toggle: switch favourable class and re-query the service. */
  async doSetFavourable(value: 0 | 1): Promise<void> {
    this.state = { ...this.state, favourableClass: value };
    await this.doEvaluate();
  }

  async doSetSensitive(feature: string | null): Promise<void> {
    this.state = { ...this.state, sensitiveAttribute: feature };
  }

  async doSetLegitimate(features: string[]): Promise<void> {
    this.state = { ...this.state, legitimateAttributes: features };
  }

  // -- rendering ---------------------------------------------------------------

  html(): string {
    if (!this.tree || !this.dataset) {
      return `<div class="loading">loading audit session...</div>`;
    }
    const sidebar = renderFeatureSidebar(this.state, {
      dataset: this.dataset,
      histograms: this.histograms,
      groupSets: this.groupSets,
      selectedFeatures: this.selectedFeatures,
    });
    const tab = this.state.activeTab === "SubgroupExploration"
      ? renderSubgroupExploration(this.state, {
          metrics: this.metrics,
          suggestions: this.suggestions,
          similar: this.similar,
          comparison: this.comparison,
        })
      : renderFairnessCompass(this.state, {
          tree: this.tree,
          description: this.description,
          dataset: this.dataset,
          result: this.result,
        });
    return `<div class="app${this.state.collapsedSidebar ? " sidebar-collapsed" : ""}">` +
      sidebar +
      `<main style="flex-basis:${((1 - this.state.paneDividers.sidebar) * 100).toFixed(0)}%">` +
      renderTabs(this.state) + tab + `</main></div>`;
  }
}
