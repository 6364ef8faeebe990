import type {
  ApplyResult,
  Choice,
  DecidedItemView,
  ItemStatusView,
  NextItemResponse,
  SessionView,
} from "./types";

export class ConflictError extends Error {}

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

async function expectJson<T>(resp: Response): Promise<T> {
  if (resp.status === 409) {
    throw new ConflictError(await resp.text());
  }
  if (!resp.ok) {
    throw new ApiError(resp.status, await resp.text());
  }
  return (await resp.json()) as T;
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private url(path: string): string {
    return this.baseUrl + path;
  }

  listSessions(): Promise<SessionView[]> {
    return fetch(this.url("/sessions")).then((r) => expectJson<SessionView[]>(r));
  }

  getSession(sessionId: string): Promise<SessionView> {
    return fetch(this.url(`/sessions/${sessionId}`)).then((r) => expectJson<SessionView>(r));
  }

  nextItem(sessionId: string): Promise<NextItemResponse> {
    return fetch(this.url(`/sessions/${sessionId}/next`)).then((r) =>
      expectJson<NextItemResponse>(r),
    );
  }

  sessionItems(sessionId: string): Promise<ItemStatusView[]> {
    return fetch(this.url(`/sessions/${sessionId}/items`)).then((r) =>
      expectJson<ItemStatusView[]>(r),
    );
  }

  decide(itemId: string, choice: Choice, reviewer: string): Promise<DecidedItemView> {
    return fetch(this.url(`/items/${itemId}/decision`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ choice, reviewer }),
    }).then((r) => expectJson<DecidedItemView>(r));
  }

  apply(sessionId: string, variantName: string, allowPartial: boolean): Promise<ApplyResult> {
    return fetch(this.url(`/sessions/${sessionId}/apply`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ variant_name: variantName, allow_partial: allowPartial }),
    }).then((r) => expectJson<ApplyResult>(r));
  }

  photoUrl(view: { photo: string }): string {
    return this.url(view.photo);
  }

  overlayUrl(view: { overlay_a: string; overlay_b: string }, side: "a" | "b",
             alpha: number, classes: number[] | null): string {
    const path = side === "a" ? view.overlay_a : view.overlay_b;
    const params = new URLSearchParams({ alpha: alpha.toFixed(2) });
    if (classes !== null) {
      params.set("classes", classes.join(","));
    }
    return this.url(`${path}?${params.toString()}`);
  }
}
