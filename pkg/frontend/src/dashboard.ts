// Session dashboard: list every session with its progress, open or resume.

import { ApiClient } from "./api";
import type { SessionView } from "./types";

export class Dashboard {
  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly onOpen: (session: SessionView) => void,
  ) {}

  async init(): Promise<void> {
    const sessions = await this.api.listSessions();
    this.render(sessions);
  }

  destroy(): void {
    this.root.replaceChildren();
  }

  private render(sessions: SessionView[]): void {
    this.root.replaceChildren();
    const heading = document.createElement("h1");
    heading.textContent = "Review sessions";
    this.root.append(heading);

    if (sessions.length === 0) {
      const empty = document.createElement("p");
      empty.className = "empty";
      empty.textContent =
        "No sessions yet. Create one against the service, e.g. " +
        'POST /sessions {"mode": "rot-maybe-cast", "seed": 1}.';
      this.root.append(empty);
      return;
    }

    const list = document.createElement("ul");
    list.className = "session-list";
    for (const session of sessions) {
      const entry = document.createElement("li");
      entry.className = "session-entry";
      entry.dataset.sessionId = session.session_id;

      const title = document.createElement("span");
      title.className = "session-title";
      title.textContent = `${session.session_id} · ${session.mode} · ${session.status}`;

      const bar = document.createElement("progress");
      bar.max = session.total;
      bar.value = session.decided;
      const count = document.createElement("span");
      count.className = "session-count";
      count.textContent = `${session.decided}/${session.total}`;

      const open = document.createElement("button");
      open.textContent = session.decided === 0 ? "open"
        : session.decided < session.total ? "resume" : "summary";
      open.addEventListener("click", () => this.onOpen(session));

      entry.append(title, bar, count, open);
      list.append(entry);
    }
    this.root.append(list);
  }
}
