import { beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { CaseView } from "../src/caseView.js";
import type { CasePayload } from "../src/types.js";

function payload(overrides: Partial<CasePayload> = {}): CasePayload {
  return {
    case_id: "case001",
    image_urls: ["/cases/case001/images/0.png"],
    indication: "Cough.",
    prefill: "There is a mild left-sided pleural effusion in the lower zone.",
    ...overrides,
  };
}

function makeView(
  p: CasePayload,
  onDone = () => {},
  api: ApiClient = new ApiClient("http://test"),
): { view: CaseView; container: HTMLElement } {
  const view = new CaseView(api, "session1", p, { onDone });
  const container = document.createElement("div");
  document.body.appendChild(container);
  view.render(container);
  return { view, container };
}

function stubReportOk(): ReturnType<typeof vi.fn> {
  const mock = vi.fn(async (url: RequestInfo | URL) => {
    const path = String(url);
    if (path.endsWith("/report")) {
      return new Response(JSON.stringify({ ok: true, elapsed_s: 1.2 }), { status: 200 });
    }
    return new Response(JSON.stringify({ ok: true }), { status: 200 });
  });
  vi.stubGlobal("fetch", mock);
  return mock;
}

async function settle(): Promise<void> {
  await new Promise((resolve) => setTimeout(resolve, 0));
  await new Promise((resolve) => setTimeout(resolve, 0));
}

beforeEach(() => {
  document.body.innerHTML = "";
  vi.restoreAllMocks();
});

describe("render_case", () => {
  it("prefills the textarea for drafted cases", () => {
    const { container } = makeView(payload());
    const textarea = container.querySelector("textarea.report-editor") as HTMLTextAreaElement;
    expect(textarea.value).toContain("pleural effusion");
  });

  it("gives scratch cases an empty textarea", () => {
    const { container } = makeView(payload({ prefill: "" }));
    const textarea = container.querySelector("textarea.report-editor") as HTMLTextAreaElement;
    expect(textarea.value).toBe("");
  });

  it("starts a visible timer on first render", () => {
    const { view, container } = makeView(payload());
    expect(view.timer.running).toBe(true);
    expect(container.querySelector(".timer")).not.toBeNull();
  });

  it("does not reset the timer when rendered twice", async () => {
    const { view, container } = makeView(payload());
    await new Promise((resolve) => setTimeout(resolve, 80));
    view.render(container.parentElement as HTMLElement);
    expect(view.timer.elapsedMs()).toBeGreaterThanOrEqual(60);
  });

  it("shows an error banner and no timer when images are missing", () => {
    const { view, container } = makeView(payload({ image_urls: [] }));
    expect(container.querySelector(".error-banner")).not.toBeNull();
    expect(view.timer.running).toBe(false);
  });

  it("keeps arm and source words out of the DOM", () => {
    const { container } = makeView(payload({ prefill: "No acute findings." }));
    const html = container.innerHTML.toLowerCase();
    for (const word of ["arm", "scratch", "model_draft", "resident", "source"]) {
      expect(html).not.toContain(word);
    }
  });

  it("images toggle zoom on click", () => {
    const { container } = makeView(payload());
    const img = container.querySelector("img.case-image") as HTMLImageElement;
    img.click();
    expect(img.classList.contains("zoomed")).toBe(true);
    img.click();
    expect(img.classList.contains("zoomed")).toBe(false);
  });
});

describe("submit_flow", () => {
  it("feedback panel is absent from the DOM before report submission", () => {
    const { view, container } = makeView(payload());
    expect(view.hasFeedbackPanelInDom()).toBe(false);
    expect(container.querySelector(".feedback-panel")).toBeNull();
    expect(container.querySelector('input[name="likert"]')).toBeNull();
  });

  it("blocks empty report text with a validation message", async () => {
    const fetchMock = stubReportOk();
    const { container } = makeView(payload({ prefill: "" }));
    (container.querySelector("button.submit-report") as HTMLButtonElement).click();
    await settle();
    const validation = container.querySelector(".validation") as HTMLElement;
    expect(validation.classList.contains("hidden")).toBe(false);
    expect(validation.textContent).toContain("empty");
    expect(fetchMock).not.toHaveBeenCalled();
  });

  it("transitions to the feedback phase after a successful report", async () => {
    stubReportOk();
    const { view, container } = makeView(payload());
    (container.querySelector("button.submit-report") as HTMLButtonElement).click();
    await settle();
    expect(view.phase).toBe("feedback");
    expect(view.hasFeedbackPanelInDom()).toBe(true);
    expect(container.querySelector(".feedback-panel")).not.toBeNull();
  });

  it("maps the five likert choices to -10..10", async () => {
    stubReportOk();
    const { container } = makeView(payload());
    (container.querySelector("button.submit-report") as HTMLButtonElement).click();
    await settle();
    const values = Array.from(
      container.querySelectorAll<HTMLInputElement>('input[name="likert"]'),
    ).map((input) => Number(input.value));
    expect(values).toEqual([-10, -5, 0, 5, 10]);
  });

  it("sends likert 10 when strongly agree is selected", async () => {
    const fetchMock = stubReportOk();
    const { container } = makeView(payload());
    (container.querySelector("button.submit-report") as HTMLButtonElement).click();
    await settle();
    const strongly = Array.from(
      container.querySelectorAll<HTMLInputElement>('input[name="likert"]'),
    ).find((input) => input.value === "10") as HTMLInputElement;
    strongly.checked = true;
    (container.querySelector("button.submit-feedback") as HTMLButtonElement).click();
    await settle();
    const feedbackCall = fetchMock.mock.calls.find(([url]) => String(url).endsWith("/feedback"));
    expect(feedbackCall).toBeDefined();
    const body = JSON.parse((feedbackCall?.[1] as RequestInit).body as string);
    expect(body.likert).toBe(10);
  });

  it("groups edit reasons into content and style", async () => {
    stubReportOk();
    const { container } = makeView(payload());
    (container.querySelector("button.submit-report") as HTMLButtonElement).click();
    await settle();
    const legends = Array.from(container.querySelectorAll("legend")).map((l) => l.textContent);
    expect(legends).toEqual(["Content", "Style"]);
    const reasons = Array.from(
      container.querySelectorAll<HTMLInputElement>('input[name="reason"]'),
    ).map((i) => i.value);
    expect(reasons).toContain("missing_finding");
    expect(reasons).toContain("phrasing");
    expect(reasons).toHaveLength(8);
  });

  it("requires a likert answer on drafted cases before feedback submits", async () => {
    const fetchMock = stubReportOk();
    const { container } = makeView(payload());
    (container.querySelector("button.submit-report") as HTMLButtonElement).click();
    await settle();
    (container.querySelector("button.submit-feedback") as HTMLButtonElement).click();
    await settle();
    const validation = container.querySelector(".feedback-validation") as HTMLElement;
    expect(validation.classList.contains("hidden")).toBe(false);
    const feedbackCalls = fetchMock.mock.calls.filter(([url]) => String(url).endsWith("/feedback"));
    expect(feedbackCalls).toHaveLength(0);
  });

  it("scratch cases submit minimal feedback and finish", async () => {
    stubReportOk();
    let done = false;
    const { view, container } = makeView(payload({ prefill: "" }), () => {
      done = true;
    });
    const textarea = container.querySelector("textarea.report-editor") as HTMLTextAreaElement;
    textarea.value = "A fresh report.";
    (container.querySelector("button.submit-report") as HTMLButtonElement).click();
    await settle();
    expect(container.querySelector('input[name="likert"]')).toBeNull();
    (container.querySelector("button.submit-feedback") as HTMLButtonElement).click();
    await settle();
    expect(view.phase).toBe("done");
    expect(done).toBe(true);
  });

  it("preserves the edited text when the report POST fails", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => {
        throw new TypeError("offline");
      }),
    );
    const { container } = makeView(payload({ prefill: "" }), () => {},
                                   new ApiClient("http://test", 1, 1));
    const textarea = container.querySelector("textarea.report-editor") as HTMLTextAreaElement;
    textarea.value = "Precious words.";
    (container.querySelector("button.submit-report") as HTMLButtonElement).click();
    await new Promise((resolve) => setTimeout(resolve, 50));
    await settle();
    expect(textarea.value).toBe("Precious words.");
    const validation = container.querySelector(".validation") as HTMLElement;
    expect(validation.textContent).toContain("retry");
    const button = container.querySelector("button.submit-report") as HTMLButtonElement;
    expect(button.disabled).toBe(false);
  }, 20000);
});
