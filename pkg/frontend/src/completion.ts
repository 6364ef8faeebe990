// Completion screen: decision summary, provenance reveal statistics and the
// apply-variant trigger. Provenance is only ever shown here, after the
// server has revealed it for decided items.

import { ApiClient, ConflictError } from "./api";
import type { ItemStatusView } from "./types";

export class CompletionScreen {
  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    readonly sessionId: string,
  ) {}

  async init(): Promise<void> {
    const [session, items] = await Promise.all([
      this.api.getSession(this.sessionId),
      this.api.sessionItems(this.sessionId),
    ]);
    this.render(session.status, items);
  }

  destroy(): void {
    this.root.replaceChildren();
  }

  private render(status: string, items: ItemStatusView[]): void {
    this.root.replaceChildren();
    const heading = document.createElement("h1");
    heading.textContent = `Session ${this.sessionId} — summary`;
    this.root.append(heading);

    const decided = items.filter((i) => i.decision === "a" || i.decision === "b");
    const skipped = items.filter((i) => i.decision === "skip");
    const preferCounts = new Map<string, number>();
    for (const item of decided) {
      const source = item.provenance?.[item.decision as "a" | "b"];
      if (source) {
        preferCounts.set(source, (preferCounts.get(source) ?? 0) + 1);
      }
    }

    const stats = document.createElement("ul");
    stats.className = "summary-stats";
    const add = (text: string) => {
      const li = document.createElement("li");
      li.textContent = text;
      stats.append(li);
    };
    add(`items: ${items.length}`);
    add(`decided: ${decided.length}, skipped: ${skipped.length}, ` +
        `pending: ${items.length - decided.length - skipped.length}`);
    for (const [source, count] of [...preferCounts.entries()].sort()) {
      add(`preferred ${source}: ${count} of ${decided.length}`);
    }
    this.root.append(stats);

    if (status === "closed") {
      const note = document.createElement("p");
      note.textContent = "Session closed; its variant has been applied.";
      this.root.append(note);
      return;
    }

    const form = document.createElement("form");
    form.className = "apply-form";
    const name = document.createElement("input");
    name.placeholder = "variant name (e.g. no_rm)";
    name.required = true;
    const partial = document.createElement("input");
    partial.type = "checkbox";
    const partialLabel = document.createElement("label");
    partialLabel.append(partial, document.createTextNode(" allow partial"));
    const button = document.createElement("button");
    button.textContent = "apply variant";
    const outcome = document.createElement("div");
    outcome.className = "apply-outcome";
    form.append(name, partialLabel, button, outcome);
    form.addEventListener("submit", async (ev) => {
      ev.preventDefault();
      try {
        const result = await this.api.apply(this.sessionId, name.value, partial.checked);
        outcome.textContent =
          `wrote ${result.samples_written} mask(s) as variant "${result.variant}"`;
      } catch (err) {
        outcome.textContent = err instanceof ConflictError
          ? "undecided items remain; tick 'allow partial' to apply anyway"
          : `apply failed: ${err}`;
      }
    });
    this.root.append(form);
  }
}
