// Review screen: side-by-side anonymous overlays around the photograph,
// keyboard-first deciding with auto-advance, synchronized zoom/pan.
//
// Everything rendered here derives from the server's pending-item view,
// which carries no provenance; nothing revealed by a decision response is
// kept once the screen advances.

import { ApiClient, ConflictError } from "./api";
import { isComplete, type Choice, type PendingItemView } from "./types";

const CLASS_TOGGLES: Array<[number, string]> = [
  [1, "CC"], [2, "R"], [3, "R(m)"], [4, "PW"], [5, "DC"], [6, "IC"],
];

const KEY_CHOICES: Record<string, Choice> = {
  ArrowLeft: "a",
  ArrowRight: "b",
  s: "skip",
  S: "skip",
};

interface ViewTransform {
  scale: number;
  tx: number;
  ty: number;
}

export class ReviewScreen {
  private item: PendingItemView | null = null;
  private alpha = 0.5;
  private visible = new Set(CLASS_TOGGLES.map(([id]) => id));
  private transform: ViewTransform = { scale: 1, tx: 0, ty: 0 };
  private queue: Promise<void> = Promise.resolve();
  private dragging: { x: number; y: number } | null = null;
  private readonly keyHandler = (ev: KeyboardEvent) => this.onKey(ev);

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    readonly sessionId: string,
    private readonly reviewer: string,
    private readonly onComplete: () => void,
  ) {}

  async init(): Promise<void> {
    document.addEventListener("keydown", this.keyHandler);
    await this.advance();
  }

  destroy(): void {
    document.removeEventListener("keydown", this.keyHandler);
    this.root.replaceChildren();
  }

  private async advance(): Promise<void> {
    const next = await this.api.nextItem(this.sessionId);
    if (isComplete(next)) {
      this.item = null;
      this.onComplete();
      return;
    }
    this.item = next;
    this.transform = { scale: 1, tx: 0, ty: 0 };
    this.render();
  }

  private onKey(ev: KeyboardEvent): void {
    const choice = KEY_CHOICES[ev.key];
    if (!choice || !this.item) {
      return;
    }
    ev.preventDefault();
    this.submit(choice);
  }

  // Submissions are serialized; a conflict means someone else decided this
  // item, so the screen refetches instead of retrying.
  submit(choice: Choice): void {
    const item = this.item;
    if (!item) {
      return;
    }
    this.item = null; // optimistic: stop accepting input for this item
    this.setStatus(`submitting ${choice === "skip" ? "skip" : choice.toUpperCase()}…`);
    this.queue = this.queue
      .then(() => this.api.decide(item.item_id, choice, this.reviewer))
      .then(() => this.advance())
      .catch((err) => {
        if (err instanceof ConflictError) {
          return this.advance();
        }
        this.setStatus(`submit failed: ${err}`);
        this.item = item;
        return undefined;
      });
  }

  private setStatus(text: string): void {
    const el = this.root.querySelector<HTMLElement>(".status");
    if (el) {
      el.textContent = text;
    }
  }

  private overlaySrc(side: "a" | "b"): string {
    const classes = this.visible.size === CLASS_TOGGLES.length
      ? null
      : [...this.visible].sort((x, y) => x - y);
    return this.api.overlayUrl(this.item!, side, this.alpha, classes);
  }

  private applyTransform(): void {
    const { scale, tx, ty } = this.transform;
    const css = `translate(${tx}px, ${ty}px) scale(${scale})`;
    // one shared transform string keeps all panes aligned by construction
    for (const el of this.root.querySelectorAll<HTMLElement>(".pane-content")) {
      el.style.transform = css;
    }
  }

  private refreshOverlays(): void {
    const imgA = this.root.querySelector<HTMLImageElement>('.pane[data-side="a"] img');
    const imgB = this.root.querySelector<HTMLImageElement>('.pane[data-side="b"] img');
    if (imgA && imgB && this.item) {
      imgA.src = this.overlaySrc("a");
      imgB.src = this.overlaySrc("b");
    }
  }

  private render(): void {
    const item = this.item!;
    this.root.replaceChildren();

    const header = document.createElement("header");
    header.className = "review-header";
    const progress = document.createElement("div");
    progress.className = "progress";
    progress.textContent = `item ${item.index + 1} of ${item.total} — decided ${item.decided}/${item.total}`;
    const bar = document.createElement("progress");
    bar.max = item.total;
    bar.value = item.decided;
    const sample = document.createElement("div");
    sample.className = "sample-id";
    sample.textContent = `${item.sample_id} (${item.mode})`;
    header.append(progress, bar, sample, this.buildControls());

    const panes = document.createElement("div");
    panes.className = "panes";
    panes.append(
      this.buildPane("A", "a", this.overlaySrc("a")),
      this.buildPane("photo", null, this.api.photoUrl(item)),
      this.buildPane("B", "b", this.overlaySrc("b")),
    );
    panes.addEventListener("wheel", (ev) => this.onWheel(ev), { passive: false });
    panes.addEventListener("pointerdown", (ev) => {
      this.dragging = { x: ev.clientX, y: ev.clientY };
    });
    panes.addEventListener("pointermove", (ev) => {
      if (!this.dragging) {
        return;
      }
      this.transform.tx += ev.clientX - this.dragging.x;
      this.transform.ty += ev.clientY - this.dragging.y;
      this.dragging = { x: ev.clientX, y: ev.clientY };
      this.applyTransform();
    });
    panes.addEventListener("pointerup", () => {
      this.dragging = null;
    });

    const footer = document.createElement("footer");
    footer.className = "hints";
    footer.innerHTML =
      "<kbd>←</kbd> choose A &nbsp; <kbd>→</kbd> choose B &nbsp; <kbd>S</kbd> skip";
    const status = document.createElement("div");
    status.className = "status";

    this.root.append(header, panes, footer, status);
    this.applyTransform();
  }

  private buildPane(label: string, side: "a" | "b" | null, src: string): HTMLElement {
    const fig = document.createElement("figure");
    fig.className = "pane";
    if (side) {
      fig.dataset.side = side;
    }
    const caption = document.createElement("figcaption");
    caption.textContent = label;
    const content = document.createElement("div");
    content.className = "pane-content";
    const img = document.createElement("img");
    img.src = src;
    img.alt = label;
    img.draggable = false;
    content.append(img);
    fig.append(caption, content);
    if (side) {
      fig.addEventListener("click", () => this.submit(side));
    }
    return fig;
  }

  private buildControls(): HTMLElement {
    const controls = document.createElement("div");
    controls.className = "controls";

    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = "0";
    slider.max = "1";
    slider.step = "0.05";
    slider.value = String(this.alpha);
    slider.className = "opacity";
    slider.title = "overlay opacity";
    slider.addEventListener("input", () => {
      this.alpha = Number(slider.value);
      this.refreshOverlays();
    });
    controls.append(slider);

    for (const [classId, code] of CLASS_TOGGLES) {
      const label = document.createElement("label");
      label.className = "class-toggle";
      const box = document.createElement("input");
      box.type = "checkbox";
      box.checked = this.visible.has(classId);
      box.dataset.classId = String(classId);
      box.addEventListener("change", () => {
        if (box.checked) {
          this.visible.add(classId);
        } else {
          this.visible.delete(classId);
        }
        this.refreshOverlays();
      });
      label.append(box, document.createTextNode(code));
      controls.append(label);
    }

    const reset = document.createElement("button");
    reset.textContent = "reset view";
    reset.addEventListener("click", () => {
      this.transform = { scale: 1, tx: 0, ty: 0 };
      this.applyTransform();
    });
    controls.append(reset);
    return controls;
  }

  private onWheel(ev: WheelEvent): void {
    ev.preventDefault();
    const factor = Math.exp(-ev.deltaY / 400);
    this.transform.scale = Math.min(16, Math.max(0.25, this.transform.scale * factor));
    this.applyTransform();
  }
}
