// Thin typed client over the reader-study HTTP API with retry-safe posts.
//
// Mutating requests carry an idempotency key and are retried on network
// failure. A 409 "duplicate" answer on a retry means the first attempt did
// land, so the submission is treated as delivered rather than lost.

import type { CasePayload, FeedbackPayload, ReportAck, SessionResponse } from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

function newIdempotencyKey(): string {
  return `${Date.now().toString(36)}-${Math.random().toString(36).slice(2, 10)}`;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly maxRetries = 3,
    private readonly retryDelayMs = 250,
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    idempotencyKey?: string,
  ): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (idempotencyKey) headers["Idempotency-Key"] = idempotencyKey;
    const response = await fetch(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = (await response.json()) as T & { error?: string };
    if (!response.ok) {
      throw new ApiError(payload.error ?? `HTTP ${response.status}`, response.status);
    }
    return payload;
  }

  private async postWithRetry<T>(path: string, body: unknown): Promise<T> {
    const key = newIdempotencyKey();
    let lastError: unknown;
    for (let attempt = 0; attempt <= this.maxRetries; attempt++) {
      try {
        return await this.request<T>("POST", path, body, key);
      } catch (err) {
        if (err instanceof ApiError) {
          // a duplicate rejection on retry means the original attempt landed
          if (attempt > 0 && err.status === 409 && /duplicate/.test(err.message)) {
            return { ok: true } as T;
          }
          throw err; // other protocol errors are not retryable
        }
        lastError = err; // network failure: retry with the same key
        await new Promise((resolve) => setTimeout(resolve, this.retryDelayMs * (attempt + 1)));
      }
    }
    throw lastError instanceof Error ? lastError : new Error("request failed after retries");
  }

  createSession(readerId: string, role: string): Promise<SessionResponse> {
    return this.postWithRetry<SessionResponse>("/sessions", { reader_id: readerId, role });
  }

  nextCase(sessionId: string): Promise<CasePayload | { done: true }> {
    return this.request<CasePayload | { done: true }>("GET", `/sessions/${sessionId}/next`);
  }

  submitReport(
    sessionId: string,
    caseId: string,
    text: string,
    clientElapsedS: number,
  ): Promise<ReportAck> {
    return this.postWithRetry<ReportAck>(`/sessions/${sessionId}/cases/${caseId}/report`, {
      text,
      client_elapsed_s: clientElapsedS,
    });
  }

  submitFeedback(sessionId: string, caseId: string, feedback: FeedbackPayload): Promise<{ ok: boolean }> {
    const body: Record<string, unknown> = { comment: feedback.comment };
    if (feedback.likert !== null) body.likert = feedback.likert;
    if (feedback.reasons.length > 0) body.reasons = feedback.reasons;
    if (feedback.efficiency !== null) body.efficiency = feedback.efficiency;
    return this.postWithRetry<{ ok: boolean }>(
      `/sessions/${sessionId}/cases/${caseId}/feedback`,
      body,
    );
  }

  imageUrl(path: string): string {
    return this.baseUrl + path;
  }
}
