// Wire types of the reader-study backend HTTP JSON API.
// Case payloads are blinded: they never carry arm or draft-source fields.

export interface CasePayload {
  case_id: string;
  image_urls: string[];
  indication: string;
  prefill: string;
}

export interface SessionResponse {
  session_id: string;
}

export interface ReportAck {
  ok: boolean;
  elapsed_s: number;
}

export type Phase = "editing" | "feedback" | "done";

// Five-point Likert scale weighted to [-10, 10] for analysis.
export const LIKERT_CHOICES: ReadonlyArray<{ value: number; label: string }> = [
  { value: -10, label: "strongly disagree" },
  { value: -5, label: "disagree" },
  { value: 0, label: "neutral" },
  { value: 5, label: "agree" },
  { value: 10, label: "strongly agree" },
];

export const CONTENT_REASONS = [
  "missing_finding",
  "false_prediction",
  "severity_misassessment",
  "wrong_location",
] as const;

export const STYLE_REASONS = [
  "ordering",
  "phrasing",
  "verbosity",
  "formatting",
] as const;

export interface FeedbackPayload {
  likert: number | null;
  reasons: string[];
  efficiency: { writing: boolean; interpretation: boolean } | null;
  comment: string;
}
