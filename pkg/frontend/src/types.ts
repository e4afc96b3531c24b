/** Payload shapes returned by the audit service under /api/v1/. */

export type Rate = number | null;

export interface MetricVector {
  size: number;
  accuracy: Rate;
  precision: Rate;
  recall: Rate;
  tnr: Rate;
  fpr: Rate;
  fnr: Rate;
  positive_rate: Rate;
  negative_rate: Rate;
  base_rate: Rate;
}

export interface SubgroupInfo {
  id: string;
  dataset_id: string;
  predicates: { feature: string; category: string | null; bin_index: number | null }[];
  display_name: string;
  size: number;
}

export interface SubgroupMetrics {
  subgroup: SubgroupInfo;
  metrics: MetricVector;
}

export interface MetricsResponse {
  selected_rates: string[];
  overall: MetricVector;
  subgroups: SubgroupMetrics[];
}

export interface Histogram {
  feature: string;
  bins: [string, number][];
  total: number;
}

export interface FeatureSummary {
  name: string;
  kind: "categorical" | "numeric";
  categories: string[] | null;
  bin_edges: number[] | null;
}

export interface DatasetSummary {
  id: string;
  row_count: number;
  features: FeatureSummary[];
  label_column: string;
  prediction_column: string;
  score_column: string | null;
}

export interface GroupSetInfo {
  id: string;
  name: string;
  subgroup_ids: string[];
  created_at: string;
}

export interface StageLogEntry {
  timestamp: string;
  stage: string;
  action: string;
  payload: Record<string, unknown>;
  note: string | null;
}

export interface SessionState {
  id: string;
  dataset: DatasetSummary;
  active_subgroups: SubgroupInfo[];
  subgroup_registry: Record<string, SubgroupInfo>;
  saved_group_sets: GroupSetInfo[];
  pinned_subgroup: string | null;
  tree_path: [string, string][];
  selected_definition: string | null;
  stage_log: StageLogEntry[];
  evaluations: EvaluationRecord[];
  frontier?: string;
}

export interface ParityAssessment {
  kind: "parity";
  rate_kind: string;
  favourable_class: number | null;
  per_group: [string, Rate][];
  max_abs_difference: number;
  min_ratio: Rate;
  satisfied: boolean;
  threshold: number;
}

export interface StratumEntry {
  predicates: { feature: string; category: string | null; bin_index: number | null }[];
  assessment: ParityAssessment;
}

export interface StratifiedParity {
  kind: "stratified_parity";
  legitimate_attributes: string[];
  strata: StratumEntry[];
  satisfied: boolean;
  warnings: string[];
}

export interface CompositeParity {
  kind: "composite_parity";
  parts: ParityAssessment[];
  satisfied: boolean;
}

export type EvaluationResult = ParityAssessment | StratifiedParity | CompositeParity;

export interface EvaluationRecord {
  definition_id: string;
  inputs: Record<string, unknown>;
  result: EvaluationResult;
  timestamp: string;
}

export interface TreeNode {
  id: string;
  kind: "question" | "leaf";
  text: string;
  answers: { label: string; target: string }[];
  definition?: string;
}

export interface TreeDocument {
  version: string;
  root: string;
  nodes: TreeNode[];
}

export interface NodeDescription {
  node_id: string;
  kind: string;
  text: string;
  answers: string[];
  definition_id: string | null;
  definition_name: string | null;
  definition_description: string | null;
  required_inputs: string[] | null;
}

export interface SuggestionEntry {
  subgroup: SubgroupInfo;
  source_cluster: number;
  dominance: Record<string, number>;
  notability: number;
}

export interface SimilarEntry {
  subgroup: SubgroupInfo;
  distance: number;
}

export interface CompareResponse {
  pinned: SubgroupMetrics;
  hovered: SubgroupMetrics;
  deltas: Record<string, Rate>;
}
