/** Payload shapes returned by the reporting service. Field names match the wire format. */

/** A selectable suggestion card, optionally backed by a screen capture. */
export interface SuggestionCard {
  /** Opaque server-issued id, valid only for the pending suggestion set */
  id: string;
  /** Short human-readable label, e.g. "Tap 'Save'" */
  caption: string;
  /** Capture URL to display behind the caption, if the screen was captured */
  image_url: string | null;
  /** [x1, y1, x2, y2] of the targeted component in capture pixels */
  highlight_bounds: [number, number, number, number] | null;
}

/** One recorded reproduction step as shown in the steps panel. */
export interface ReportedStep {
  index: number;
  text: string;
  /** True when the step was verified against the app model */
  matched: boolean;
  /** True when the system inserted this step to bridge a gap */
  inferred: boolean;
  source: 'typed' | 'suggested' | 'edited';
  /** True when an upstream edit broke the chain through this step */
  stale: boolean;
  /** Asset-relative capture name, e.g. "screenshots/home.png" */
  screenshot: string | null;
}

/** Everything the panels need after one user event. */
export interface DialogueResponse {
  session_id: string;
  phase: string;
  messages: string[];
  suggestion_cards: SuggestionCard[];
  reported_steps: ReportedStep[];
  /** Captures of the last three verified steps, oldest first */
  capture_panel: string[];
  tips: string[];
  can_finish: boolean;
}

/** One installed app as listed by GET /apps. */
export interface AppSummary {
  app_id: string;
  name: string;
  version: string;
  icon_url: string;
  node_count: number;
  edge_count: number;
}

/** A single problem found while validating an uploaded trace package. */
export interface UploadIssue {
  /** Archive entry the problem was found in ("" for package-level problems) */
  file: string;
  /** Event index within the trace, when applicable */
  sequence: number | null;
  message: string;
}

/** Outcome of POST /apps. `ok: false` means nothing was published. */
export interface ValidationReport {
  ok: boolean;
  app_name: string | null;
  app_version: string | null;
  trace_count: number;
  event_count: number;
  errors: UploadIssue[];
  /** Present on success */
  app_id?: string;
}

/** Body of a non-2xx service response. */
export interface ApiErrorBody {
  detail: string;
  reason?: string;
}
