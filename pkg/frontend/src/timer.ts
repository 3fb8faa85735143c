// Per-case timer: starts once on first render and is monotonic from there,
// so navigating away and back (or re-rendering) never resets it.

export class CaseTimer {
  private startedAt: number | null = null;

  start(): void {
    if (this.startedAt === null) {
      this.startedAt = performance.now();
    }
  }

  get running(): boolean {
    return this.startedAt !== null;
  }

  elapsedMs(): number {
    if (this.startedAt === null) return 0;
    return performance.now() - this.startedAt;
  }

  elapsedSeconds(): number {
    return this.elapsedMs() / 1000;
  }

  display(): string {
    const total = Math.floor(this.elapsedMs() / 1000);
    const minutes = Math.floor(total / 60);
    const seconds = total % 60;
    return `${minutes}:${seconds.toString().padStart(2, "0")}`;
  }
}
