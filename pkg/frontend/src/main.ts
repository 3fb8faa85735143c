// Session bootstrap and the one-case-at-a-time flow loop.

import { ApiClient } from "./api.js";
import { CaseView } from "./caseView.js";
import type { CasePayload } from "./types.js";

export interface AppConfig {
  baseUrl: string;
  readerId: string;
  role: string;
}

export function configFromLocation(loc: Location): AppConfig {
  const params = new URLSearchParams(loc.search);
  return {
    baseUrl: params.get("api") ?? "",
    readerId: params.get("reader") ?? "",
    role: params.get("role") ?? "",
  };
}

export class App {
  private readonly api: ApiClient;
  private sessionId = "";
  current: CaseView | null = null;

  constructor(
    private readonly config: AppConfig,
    private readonly container: HTMLElement,
  ) {
    this.api = new ApiClient(config.baseUrl);
  }

  async start(): Promise<void> {
    if (!this.config.readerId || !this.config.role) {
      this.container.textContent = "Missing reader or role; open this page with ?reader=...&role=...";
      return;
    }
    const session = await this.api.createSession(this.config.readerId, this.config.role);
    this.sessionId = session.session_id;
    await this.advance();
  }

  async advance(): Promise<void> {
    const next = await this.api.nextCase(this.sessionId);
    if ("done" in next && next.done) {
      this.current = null;
      this.container.textContent = "All assigned cases are complete. Thank you.";
      return;
    }
    const payload = next as CasePayload;
    this.current = new CaseView(this.api, this.sessionId, payload, {
      onDone: () => void this.advance(),
    });
    this.current.render(this.container);
  }
}

export function bootstrap(): void {
  const container = document.getElementById("app");
  if (!container) throw new Error("missing #app container");
  const app = new App(configFromLocation(window.location), container);
  void app.start();
}

declare global {
  interface Window {
    __READER_APP_BOOTSTRAPPED?: boolean;
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined" && document.getElementById("app")) {
  if (!window.__READER_APP_BOOTSTRAPPED) {
    window.__READER_APP_BOOTSTRAPPED = true;
    bootstrap();
  }
}
