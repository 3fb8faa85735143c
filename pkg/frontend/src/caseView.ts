// One case on screen at a time: image panel, indication, timed report editor,
// then a staged feedback form that is only built after the report lands.
//
// Blinding: everything rendered comes from the blinded case payload, so the
// DOM can never carry arm or draft-source information.

import { ApiClient } from "./api.js";
import { CaseTimer } from "./timer.js";
import {
  CasePayload,
  CONTENT_REASONS,
  FeedbackPayload,
  LIKERT_CHOICES,
  Phase,
  STYLE_REASONS,
} from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export interface CaseViewCallbacks {
  onDone: () => void;
}

export class CaseView {
  readonly timer = new CaseTimer();
  phase: Phase = "editing";

  private root: HTMLElement | null = null;
  private textarea: HTMLTextAreaElement | null = null;
  private validationBanner: HTMLElement | null = null;
  private feedbackPanel: HTMLElement | null = null;
  private timerHandle: ReturnType<typeof setInterval> | null = null;
  private reportSubmitted = false;
  private editedText = "";

  constructor(
    private readonly api: ApiClient,
    private readonly sessionId: string,
    readonly payload: CasePayload,
    private readonly callbacks: CaseViewCallbacks,
  ) {}

  /** Build the editing view; re-rendering keeps the original timer running. */
  render(container: HTMLElement): void {
    container.textContent = "";
    const root = el("div", "case-view");
    this.root = root;
    container.appendChild(root);

    if (!this.payload.image_urls || this.payload.image_urls.length === 0) {
      const banner = el("div", "error-banner", "This case has no images; please contact the study coordinator.");
      root.appendChild(banner);
      return; // no timer start without images
    }

    const imagePanel = el("div", "image-panel");
    for (const url of this.payload.image_urls) {
      const img = el("img", "case-image");
      img.src = this.api.imageUrl(url);
      img.alt = "study image";
      img.addEventListener("click", () => img.classList.toggle("zoomed"));
      imagePanel.appendChild(img);
    }
    root.appendChild(imagePanel);

    const side = el("div", "editor-panel");
    root.appendChild(side);

    side.appendChild(el("h2", "case-title", `Case ${this.payload.case_id}`));
    side.appendChild(el("p", "indication", `Indication: ${this.payload.indication}`));

    const timerLabel = el("div", "timer", "0:00");
    side.appendChild(timerLabel);

    if (this.phase === "editing") {
      const textarea = el("textarea", "report-editor");
      textarea.rows = 12;
      textarea.value = this.reportSubmitted ? this.editedText : (this.editedText || this.payload.prefill);
      this.textarea = textarea;
      side.appendChild(textarea);

      this.validationBanner = el("div", "validation hidden");
      side.appendChild(this.validationBanner);

      const submit = el("button", "submit-report", "Submit report");
      submit.addEventListener("click", () => {
        void this.submitFlow(side, submit);
      });
      side.appendChild(submit);
    }

    this.timer.start(); // no-op on re-render: monotonic from first render
    if (this.timerHandle === null) {
      this.timerHandle = setInterval(() => {
        timerLabel.textContent = this.timer.display();
      }, 500);
    }
  }

  /** POST the report, then stage the feedback panel, then finish the case. */
  async submitFlow(side: HTMLElement, submitButton: HTMLButtonElement): Promise<void> {
    if (this.phase !== "editing" || this.textarea === null) return;
    const text = this.textarea.value;
    if (!text.trim()) {
      if (this.validationBanner) {
        this.validationBanner.textContent = "The report text is empty; please write or edit the report before submitting.";
        this.validationBanner.classList.remove("hidden");
      }
      return;
    }
    submitButton.disabled = true;
    this.editedText = text;
    try {
      await this.api.submitReport(
        this.sessionId,
        this.payload.case_id,
        text,
        this.timer.elapsedSeconds(),
      );
    } catch (err) {
      submitButton.disabled = false;
      if (this.validationBanner) {
        this.validationBanner.textContent = `Submission failed: ${(err as Error).message}. Your text is preserved; please retry.`;
        this.validationBanner.classList.remove("hidden");
      }
      return;
    }
    this.reportSubmitted = true;
    this.phase = "feedback";
    this.textarea.readOnly = true;
    submitButton.remove();
    this.buildFeedbackPanel(side);
  }

  /** The feedback form exists in the DOM only after a successful report POST. */
  private buildFeedbackPanel(side: HTMLElement): void {
    const panel = el("div", "feedback-panel");
    this.feedbackPanel = panel;
    const drafted = this.payload.prefill !== "";

    if (drafted) {
      panel.appendChild(el("h3", undefined, "Does the report address the exam indication?"));
      const likertGroup = el("div", "likert-group");
      for (const choice of LIKERT_CHOICES) {
        const label = el("label", "likert-choice");
        const input = el("input");
        input.type = "radio";
        input.name = "likert";
        input.value = String(choice.value);
        label.appendChild(input);
        label.appendChild(document.createTextNode(` ${choice.label}`));
        likertGroup.appendChild(label);
      }
      panel.appendChild(likertGroup);

      panel.appendChild(el("h3", undefined, "Reasons for your edits"));
      const reasons = el("div", "reason-groups");
      const groups: Array<[string, readonly string[]]> = [
        ["Content", CONTENT_REASONS],
        ["Style", STYLE_REASONS],
      ];
      for (const [title, ids] of groups) {
        const group = el("fieldset", "reason-group");
        group.appendChild(el("legend", undefined, title));
        for (const id of ids) {
          const label = el("label", "reason");
          const input = el("input");
          input.type = "checkbox";
          input.name = "reason";
          input.value = id;
          label.appendChild(input);
          label.appendChild(document.createTextNode(` ${id.replace(/_/g, " ")}`));
          group.appendChild(label);
        }
        reasons.appendChild(group);
      }
      panel.appendChild(reasons);

      panel.appendChild(el("h3", undefined, "Did the prefilled text improve your efficiency?"));
      const efficiency = el("div", "efficiency-toggles");
      for (const kind of ["writing", "interpretation"] as const) {
        const row = el("div", "efficiency-row");
        row.appendChild(el("span", undefined, `${kind}: `));
        for (const answer of ["Yes", "No"]) {
          const label = el("label", "efficiency-choice");
          const input = el("input");
          input.type = "radio";
          input.name = `efficiency-${kind}`;
          input.value = answer;
          if (answer === "No") input.defaultChecked = true;
          label.appendChild(input);
          label.appendChild(document.createTextNode(` ${answer}`));
          row.appendChild(label);
        }
        efficiency.appendChild(row);
      }
      panel.appendChild(efficiency);
    } else {
      panel.appendChild(el("p", undefined, "Report recorded. Any additional comments?"));
    }

    const comment = el("textarea", "comment-box");
    comment.rows = 3;
    comment.placeholder = "Free-text comments (optional)";
    panel.appendChild(comment);

    const validation = el("div", "feedback-validation hidden");
    panel.appendChild(validation);

    const submit = el("button", "submit-feedback", "Submit feedback");
    submit.addEventListener("click", () => {
      const feedback = this.collectFeedback(panel, drafted, comment.value);
      if (feedback === null) {
        validation.textContent = "Please answer the indication question before submitting.";
        validation.classList.remove("hidden");
        return;
      }
      submit.disabled = true;
      void this.api
        .submitFeedback(this.sessionId, this.payload.case_id, feedback)
        .then(() => {
          this.phase = "done";
          if (this.timerHandle !== null) clearInterval(this.timerHandle);
          this.callbacks.onDone();
        })
        .catch((err: Error) => {
          submit.disabled = false;
          validation.textContent = `Submission failed: ${err.message}. Please retry.`;
          validation.classList.remove("hidden");
        });
    });
    panel.appendChild(submit);
    side.appendChild(panel);
  }

  private collectFeedback(panel: HTMLElement, drafted: boolean, comment: string): FeedbackPayload | null {
    if (!drafted) {
      return { likert: null, reasons: [], efficiency: null, comment };
    }
    const likertInput = panel.querySelector<HTMLInputElement>('input[name="likert"]:checked');
    if (!likertInput) return null;
    const reasons = Array.from(
      panel.querySelectorAll<HTMLInputElement>('input[name="reason"]:checked'),
    ).map((input) => input.value);
    const efficiency = { writing: false, interpretation: false };
    for (const kind of ["writing", "interpretation"] as const) {
      const checked = panel.querySelector<HTMLInputElement>(
        `input[name="efficiency-${kind}"]:checked`,
      );
      efficiency[kind] = checked?.value === "Yes";
    }
    return { likert: Number(likertInput.value), reasons, efficiency, comment };
  }

  hasFeedbackPanelInDom(): boolean {
    return this.feedbackPanel !== null && this.feedbackPanel.isConnected;
  }
}
