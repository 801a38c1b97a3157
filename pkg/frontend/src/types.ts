// Shapes of the API documents the dashboard renders.
//
// Every JSON number is kept as its raw literal from the response body
// (see minijson.ts), so numeric fields are typed as Num, an alias for
// string.  Display code prints the literal unchanged; geometry code
// converts with Number() when it needs coordinates.

export type Num = string;

export interface ModelDoc {
  name: string;
  family: string;
  task: string;
  features: string[];
  interpretable: boolean;
  evaluable: boolean;
  rounds_kept?: Num;
  purified?: boolean;
  n_pairs?: Num;
  n_terms?: Num;
  smoothness?: Num;
}

export interface DatasetDoc {
  name: string;
  task: string;
  target: string;
  n_rows: Num;
  n_train: Num;
  n_test: Num;
  prepared: boolean;
  features: string[];
  content_hash: string;
}

export interface ResultStub {
  model: string | string[];
  test: string;
  config_hash: string;
  status: string;
}

export interface ExperimentDoc {
  name: string;
  seed: Num;
  created: string;
  updated: string;
  dataset: DatasetDoc | null;
  models: ModelDoc[];
  results: ResultStub[];
}

export interface ResultEntry {
  model: string | string[];
  test: string;
  config: Record<string, unknown>;
  config_hash: string;
  seed: Num;
  status: string;
  result?: ResultDoc;
  error?: { type: string; message: string };
}

export interface JobDoc {
  status: "queued" | "running" | "done" | "failed";
  result?: ResultEntry;
  error?: { type: string; message: string };
}

export interface HistogramDoc {
  edges: Num[];
  counts: Num[];
}

export interface SummaryDoc {
  numeric: Record<string, {
    count: Num;
    mean?: Num;
    sd?: Num;
    min?: Num;
    q1?: Num;
    median?: Num;
    q3?: Num;
    max?: Num;
    histogram?: HistogramDoc;
  }>;
  categorical: Record<string, { count: Num; frequencies: Record<string, Num> }>;
  correlation: {
    columns: string[];
    pearson: (Num | null)[][];
    spearman: (Num | null)[][];
  };
  class_balance: Record<string, Num> | null;
}

export interface QualityDoc {
  missing_counts: Record<string, Num>;
  constant_columns: string[];
  duplicate_rows: Num;
  outlier_counts: Record<string, Num>;
}

// -- result documents --------------------------------------------------------

export interface AccuracyDoc {
  kind: "accuracy";
  model: string;
  threshold: Num;
  splits: Record<string, Record<string, Num>>;
}

export interface WeakspotSlice {
  range?: [Num, Num];
  range_a?: [Num, Num];
  range_b?: [Num, Num];
  n: Num;
  metric: Num | null;
  flag: boolean;
}

export interface WeakspotDoc {
  kind: "weakspot";
  model: string;
  features: string[];
  binning: string;
  bins: Num;
  threshold: Num;
  min_samples: Num;
  metric: string;
  overall: Num;
  slices: WeakspotSlice[];
  regions: { range: [Num, Num]; n: Num; metric: Num }[];
}

export interface OverfitSlice {
  range?: [Num, Num];
  range_a?: [Num, Num];
  range_b?: [Num, Num];
  n_train: Num;
  n_test: Num;
  train_metric: Num;
  test_metric: Num;
  gap: Num;
  overfit: boolean;
  underfit: boolean;
}

export interface OverfitDoc {
  kind: "overfit";
  model: string;
  features: string[];
  binning: string;
  bins: Num;
  delta: Num;
  min_samples: Num;
  metric: string;
  overall_train: Num;
  overall_test: Num;
  slices: OverfitSlice[];
}

export interface ReliabilityDoc {
  kind: "reliability";
  task: string;
  model: string;
  alpha: Num;
  n_calibration: Num;
  qhat: Num;
  recipe: string;
  seed: Num;
  coverage: Num;
  mean_width?: Num;
  mean_set_size?: Num;
  per_slice_width?: { range: [Num, Num]; n: Num; width: Num | null }[];
}

export interface RobustnessPoint {
  lambda: Num;
  mean: Num;
  sd: Num;
  values: Num[];
}

export interface RobustnessDoc {
  kind: "robustness";
  model: string;
  metric: string;
  baseline: Num;
  repeats: Num;
  seed: Num;
  features: string[];
  series: RobustnessPoint[];
}

export interface ResilienceCurvePoint {
  ratio: Num;
  n: Num;
  metric: Num;
}

export interface ResilienceDoc {
  kind: "resilience";
  model: string;
  metric: string;
  baseline: Num;
  ratios: Num[];
  seed: Num;
  scenarios: {
    worst_sample?: { curve: ResilienceCurvePoint[] };
    outer_sample?: { curve: ResilienceCurvePoint[] };
    psi?: { feature: string; psi: Num }[];
    worst_cluster?: Record<string, unknown>;
  };
}

export interface FairnessGroup {
  group: string;
  n: Num;
  favorable_rate: Num | null;
  air: Num | null;
  flag: boolean;
  reference: boolean;
}

export interface FairnessDoc {
  kind: "fairness";
  model: string;
  protected: string;
  reference: string;
  favorable_threshold: Num;
  min_group: Num;
  groups: FairnessGroup[];
  warnings: string[];
  segmented: unknown;
  frontier: { threshold: Num; air: Num | null; acc: Num }[];
  flagged: boolean;
}

export interface PfiDoc {
  kind: "pfi";
  model: string;
  metric: string;
  baseline: Num;
  repeats: Num;
  seed: Num;
  features: { feature: string; mean: Num; sd: Num; values: Num[] }[];
}

export interface PdpDoc {
  kind: "pdp";
  model: string;
  features: string[];
  feature_kind: string;
  grid?: (Num | string)[];
  value: Num[] | Num[][];
  grid_a?: Num[];
  grid_b?: Num[];
}

export interface AleDoc {
  kind: "ale";
  model: string;
  feature: string;
  edges: Num[];
  value: Num[];
  count: Num[];
}

export interface LimeDoc {
  kind: "lime";
  model: string;
  samples: Num;
  seed: Num;
  kernel_width: Num;
  intercept: Num;
  features: { feature: string; coefficient: Num; scale: unknown }[];
  r2: Num;
}

export interface ShapDoc {
  kind: "shap";
  model: string;
  mode: string;
  base: Num;
  values: { feature: string; value: Num }[];
  prediction: Num;
  background: Num;
  seed: Num;
}

export interface EffectCurve {
  feature: string;
  kind: string;
  grid: (Num | string)[];
  value: Num[];
}

export interface GlobalInterpretationDoc {
  kind: "global_interpretation";
  model: string;
  family: string;
  importance: { term: string; value: Num }[];
  effects: EffectCurve[];
  pair_effects: {
    features?: [string, string];
    grid_a?: (Num | string)[];
    grid_b?: (Num | string)[];
    value?: Num[][];
    [k: string]: unknown;
  }[];
  summary: Record<string, unknown>;
}

export interface LocalInterpretationDoc {
  kind: "local_interpretation";
  model: string;
  family: string;
  base: Num;
  contributions: { term: string; value: Num }[];
  margin: Num;
  prediction: Num;
  path?: unknown;
}

export interface ComparisonDoc {
  kind: "comparison";
  models: string[];
  task: string;
  tests: string[];
  seed: Num;
  metrics: Record<string, Record<string, Record<string, Num>>>;
  curves: {
    robustness?: Record<string, RobustnessPoint[]>;
    reliability?: Record<string, Record<string, unknown>>;
    resilience?: Record<string, ResilienceCurvePoint[]>;
  };
  criteria: {
    criterion: string;
    higher_is_better: boolean;
    values: Record<string, Num | null>;
    ranks: Record<string, Num | null>;
  }[];
  overall: {
    model: string;
    mean_rank: Num | null;
    rank: Num;
    tiebreak_metric: string;
    tiebreak: Num | null;
  }[];
}

export type ResultDoc =
  | AccuracyDoc
  | WeakspotDoc
  | OverfitDoc
  | ReliabilityDoc
  | RobustnessDoc
  | ResilienceDoc
  | FairnessDoc
  | PfiDoc
  | PdpDoc
  | AleDoc
  | LimeDoc
  | ShapDoc
  | GlobalInterpretationDoc
  | LocalInterpretationDoc
  | ComparisonDoc;
