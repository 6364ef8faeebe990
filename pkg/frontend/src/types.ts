// Wire types of the curation service API. Pending item views carry no
// provenance by schema; it appears only in decision responses and decided
// item statuses.

export type Mode = "rot-maybe-cast" | "blind-gt-vs-pred";
export type Choice = "a" | "b" | "skip";

export interface SessionView {
  session_id: string;
  mode: Mode;
  status: "open" | "closed";
  created_at: string;
  seed: number;
  base_variant: string;
  applied_variant: string;
  total: number;
  decided: number;
}

export interface PendingItemView {
  item_id: string;
  sample_id: string;
  index: number;
  mode: Mode;
  total: number;
  decided: number;
  photo: string;
  overlay_a: string;
  overlay_b: string;
}

export interface SessionCompleteView {
  session_id: string;
  complete: true;
  total: number;
  decided: number;
}

export type NextItemResponse = PendingItemView | SessionCompleteView;

export function isComplete(r: NextItemResponse): r is SessionCompleteView {
  return (r as SessionCompleteView).complete === true;
}

export interface DecidedItemView {
  item_id: string;
  sample_id: string;
  index: number;
  decision: Choice;
  reviewer: string;
  decided_at: string;
  provenance: Record<"a" | "b", string>;
}

export interface ItemStatusView {
  item_id: string;
  sample_id: string;
  index: number;
  decision: Choice | "none";
  provenance: Record<"a" | "b", string> | null;
}

export interface ApplyResult {
  session_id: string;
  variant: string;
  samples_written: number;
  decided: number;
  total: number;
}
