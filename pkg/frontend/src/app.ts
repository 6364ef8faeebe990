// Hash router. Screens hold no client-only state: a reload rebuilds the
// exact same view from the API alone.

import { ApiClient } from "./api";
import { CompletionScreen } from "./completion";
import { Dashboard } from "./dashboard";
import { ReviewScreen } from "./review";

type Screen = Dashboard | ReviewScreen | CompletionScreen;

export interface AppOptions {
  baseUrl?: string;
  reviewer?: string;
}

export class App {
  readonly api: ApiClient;
  private screen: Screen | null = null;
  private lastRoutedHash: string | null = null;
  private routing: Promise<void> = Promise.resolve();
  private readonly reviewer: string;
  private readonly hashHandler = () => {
    if (window.location.hash !== this.lastRoutedHash) {
      this.routing = this.route();
    }
  };

  constructor(private readonly root: HTMLElement, options: AppOptions = {}) {
    this.api = new ApiClient(options.baseUrl ?? "");
    this.reviewer = options.reviewer ?? "expert";
  }

  async start(): Promise<void> {
    window.addEventListener("hashchange", this.hashHandler);
    await this.route();
  }

  destroy(): void {
    window.removeEventListener("hashchange", this.hashHandler);
    this.screen?.destroy();
    this.screen = null;
    this.root.replaceChildren();
  }

  // Programmatic navigation routes directly; the hashchange listener only
  // reacts to hashes it has not routed yet (browser back/forward, manual edits).
  async navigate(hash: string): Promise<void> {
    window.location.hash = hash;
    if (window.location.hash !== this.lastRoutedHash) {
      this.routing = this.route();
    }
    await this.routing;
  }

  async settled(): Promise<void> {
    await this.routing;
  }

  private async route(): Promise<void> {
    this.screen?.destroy();
    this.lastRoutedHash = window.location.hash;
    const hash = this.lastRoutedHash;
    const review = /^#\/review\/(.+)$/.exec(hash);
    const done = /^#\/done\/(.+)$/.exec(hash);
    if (review) {
      const sessionId = review[1];
      this.screen = new ReviewScreen(this.root, this.api, sessionId, this.reviewer, () => {
        void this.navigate(`#/done/${sessionId}`);
      });
    } else if (done) {
      this.screen = new CompletionScreen(this.root, this.api, done[1]);
    } else {
      this.screen = new Dashboard(this.root, this.api, (session) => {
        const target = session.decided < session.total && session.status === "open"
          ? `#/review/${session.session_id}`
          : `#/done/${session.session_id}`;
        void this.navigate(target);
      });
    }
    await this.screen.init();
  }

  current(): Screen | null {
    return this.screen;
  }
}
