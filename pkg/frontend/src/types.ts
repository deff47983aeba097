// Shapes returned by the bgplens query API.

export interface EventRef {
  ts: string;
  vp: string;
  peer_addr: string;
  peer_as: number;
  kind: string;
  prefix: string;
  path?: string;
  origin_as?: number;
}

export interface EvidenceItem {
  role: string;
  prefix?: string;
  origin_as?: number;
  origins?: number[];
  mask_length?: number;
  absent_windows?: number;
  event?: EventRef;
}

export interface Alert {
  id: string;
  kind: string;
  prefix: string;
  window: { start: number; interval: number };
  first_event_us: number;
  last_event_us: number;
  implicated: number[];
  evidence: EvidenceItem[];
  state: "open" | "acknowledged" | "dismissed";
  note: string | null;
  trigger_count: number;
}

export interface TopNEntry {
  subject: number;
  value: number;
}

export interface TopNResult {
  window: number | null;
  metric: string;
  entries: TopNEntry[];
}

export interface StabilityRow {
  window_start: number;
  path_change_count: number;
  rank: number;
  rank_change: number | null;
  rank_change_frequency: number | null;
}

export interface AsViewResult {
  asn: number;
  records: StabilityRow[];
  adjacency: { neighbor: number; transit_count: number }[];
}

export interface PathMetricsResult {
  as_a: number;
  as_b: number;
  period: [number, number] | null;
  path_count: number;
  shortest_hops: number | null;
  longest_hops: number | null;
  longest_unique_path_len: number | null;
  unique_path_count: number;
  largest_prepend: number | null;
  prepend_range: [number, number] | null;
}

export interface TimelineEvent {
  ts: string;
  vp: string;
  kind: string;
  origin_as: number | null;
  path: number[] | null;
}

export interface TimelineWindow {
  window_start: number;
  origins: number[];
  events: TimelineEvent[];
}

export interface TimelineResult {
  prefix: string;
  windows: TimelineWindow[];
}

export interface Health {
  windows_sealed: number;
  last_sealed_window: number | null;
  ingest_lag_seconds: number | null;
  alerts_open: number;
}
