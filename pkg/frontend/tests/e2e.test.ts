// End-to-end: a scripted browser session against the real Python backend.
// Verifies prefill-per-arm, staged feedback, event-log ordering, the likert
// wire values, and that the client-reported elapsed matches scripted timing.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { App } from "../src/main.js";

interface LoggedEvent {
  kind: string;
  session_id: string;
  case_id: string;
  payload: Record<string, unknown>;
  ts: string;
}

let backend: ChildProcess;
let baseUrl = "";
let outDir = "";

function readEvents(): LoggedEvent[] {
  const raw = readFileSync(join(outDir, "events.jsonl"), "utf-8");
  return raw
    .split("\n")
    .filter((line) => line.trim())
    .map((line) => JSON.parse(line) as LoggedEvent);
}

function armOf(readerId: string, caseId: string): string {
  const assignments = JSON.parse(
    readFileSync(join(outDir, "assignments.json"), "utf-8"),
  ) as Record<string, Array<[string, string]>>;
  const hit = assignments[readerId]?.find(([cid]) => cid === caseId);
  if (!hit) throw new Error(`case ${caseId} not in ${readerId}'s plan`);
  return hit[1];
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

async function waitFor(predicate: () => boolean, timeoutMs = 10000): Promise<void> {
  const start = Date.now();
  while (!predicate()) {
    if (Date.now() - start > timeoutMs) throw new Error("timed out waiting for condition");
    await sleep(25);
  }
}

beforeAll(async () => {
  outDir = mkdtempSync(join(tmpdir(), "reader-e2e-"));
  backend = spawn("python3", [join(__dirname, "fixtures", "serve_fixture.py"), outDir], {
    stdio: ["ignore", "pipe", "inherit"],
  });
  const port = await new Promise<number>((resolve, reject) => {
    const timer = setTimeout(() => reject(new Error("backend did not start")), 60000);
    backend.stdout!.on("data", (chunk: Buffer) => {
      const text = chunk.toString().trim();
      if (/^\d+$/.test(text)) {
        clearTimeout(timer);
        resolve(Number(text));
      }
    });
  });
  baseUrl = `http://127.0.0.1:${port}`;
}, 90000);

afterAll(() => {
  backend?.kill();
});

describe("scripted reader session", () => {
  it("completes cases end to end with correct prefill, timing, and event log", async () => {
    const container = document.createElement("div");
    document.body.appendChild(container);
    const app = new App({ baseUrl, readerId: "res0", role: "resident" }, container);
    await app.start();

    const scriptedWaits = [300, 450, 250];
    const observed: Array<{ caseId: string; arm: string; waitMs: number }> = [];

    for (const waitMs of scriptedWaits) {
      await waitFor(() => app.current !== null && container.querySelector(".report-editor") !== null);
      const view = app.current!;
      const caseId = view.payload.case_id;
      const arm = armOf("res0", caseId);

      const textarea = container.querySelector("textarea.report-editor") as HTMLTextAreaElement;
      if (arm === "scratch") {
        expect(view.payload.prefill).toBe("");
        expect(textarea.value).toBe("");
        textarea.value = "A written-from-scratch report.";
      } else {
        expect(view.payload.prefill).not.toBe("");
        expect(textarea.value).toBe(view.payload.prefill);
        textarea.value = view.payload.prefill + " Edited.";
      }

      // feedback form must be unreachable before the report is submitted
      expect(container.querySelector(".feedback-panel")).toBeNull();
      expect(view.hasFeedbackPanelInDom()).toBe(false);

      await sleep(waitMs);
      (container.querySelector("button.submit-report") as HTMLButtonElement).click();
      await waitFor(() => view.phase === "feedback");

      if (arm === "scratch") {
        expect(container.querySelector('input[name="likert"]')).toBeNull();
      } else {
        const strongly = Array.from(
          container.querySelectorAll<HTMLInputElement>('input[name="likert"]'),
        ).find((input) => input.value === "10")!;
        strongly.checked = true;
        const reason = container.querySelector<HTMLInputElement>(
          'input[name="reason"][value="phrasing"]',
        )!;
        reason.checked = true;
        const writingYes = container.querySelector<HTMLInputElement>(
          'input[name="efficiency-writing"][value="Yes"]',
        )!;
        writingYes.checked = true;
      }
      (container.querySelector("button.submit-feedback") as HTMLButtonElement).click();
      await waitFor(() => view.phase === "done");
      observed.push({ caseId, arm, waitMs });
    }

    const events = readEvents();
    // per-(session, case) ordering: assigned -> report -> feedback
    const byCase = new Map<string, string[]>();
    for (const event of events) {
      const key = `${event.session_id}:${event.case_id}`;
      byCase.set(key, [...(byCase.get(key) ?? []), event.kind]);
    }
    for (const kinds of byCase.values()) {
      const expected = ["assigned", "report_submitted", "feedback_submitted"].slice(0, kinds.length);
      expect(kinds).toEqual(expected);
    }

    for (const { caseId, arm, waitMs } of observed) {
      const report = events.find(
        (e) => e.kind === "report_submitted" && e.case_id === caseId,
      )!;
      expect(report).toBeDefined();
      // client elapsed within 100 ms of the scripted wait (plus UI overhead)
      const clientElapsedMs = (report.payload.client_elapsed_s as number) * 1000;
      expect(Math.abs(clientElapsedMs - waitMs)).toBeLessThanOrEqual(100);
      // server log carries the arm; the client payload never did
      expect(report.payload.arm).toBe(arm);

      const feedback = events.find(
        (e) => e.kind === "feedback_submitted" && e.case_id === caseId,
      )!;
      expect(feedback).toBeDefined();
      if (arm === "scratch") {
        expect(feedback.payload.likert).toBeNull();
      } else {
        expect(feedback.payload.likert).toBe(10);
        expect(feedback.payload.reasons).toEqual(["phrasing"]);
        expect((feedback.payload.efficiency as Record<string, boolean>).writing).toBe(true);
      }
    }
  }, 60000);

  it("keeps arm and draft-source words out of every rendered DOM state", async () => {
    const container = document.createElement("div");
    document.body.appendChild(container);
    const app = new App({ baseUrl, readerId: "att0", role: "attending" }, container);
    await app.start();
    await waitFor(() => container.querySelector(".report-editor") !== null);

    const forbidden = ["arm", "scratch", "draft", "source"];
    const html = container.innerHTML.toLowerCase();
    for (const word of forbidden) {
      expect(html, `DOM leaked "${word}"`).not.toContain(word);
    }
  }, 30000);
});
