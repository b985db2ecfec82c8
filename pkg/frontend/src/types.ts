// Wire types for the drivesearch HTTP API. Field names mirror the JSON
// payloads exactly; the console performs no scoring math of its own.

export type Band = "highly_relevant" | "moderately_relevant" | "non_relevant";

export type VerdictValue = "reliable" | "failed" | "insufficient_data";

export interface FrameInfo {
  index: number;
  timestamp: number;
  uri: string;
}

export interface RankedResult {
  record_id: string;
  s_video: number;
  s_signal: number;
  combined: number;
  distance: number;
  band: Band;
  frames: FrameInfo[];
}

export interface MetricsReport {
  largest_gap: number;
  min_distance: number;
  max_distance: number;
  distance_range: number;
  std_dev: number;
  relative_gap_pct: number;
  verdict: VerdictValue;
}

export interface ExcludedRecord {
  record_id: string;
  reason: string;
}

export interface QueryResponse {
  results: RankedResult[];
  metrics: MetricsReport;
  curve: number[];
  excluded: ExcludedRecord[];
  query_hash: string;
}

export interface BoxStats {
  min: number;
  q1: number;
  median: number;
  q3: number;
  max: number;
}

export interface PlotDocument {
  curve: number[];
  bands: { high: number; moderate: number; low: number };
  box: BoxStats;
  metrics: Omit<MetricsReport, "verdict">;
  verdict: VerdictValue;
}

export interface RecordDescription {
  source: "video" | "signal";
  prompt_id: number | null;
  text: string;
}

export interface RecordDetail {
  record_id: string;
  span: { start: number; end: number };
  descriptions: RecordDescription[];
  frames: FrameInfo[];
}

export interface ApiError {
  error: string;
  message: string;
}

export interface QueryRequest {
  text: string;
  top_n: number;
  weights: { video: number; signal: number };
  prompt_id?: number | null;
}
