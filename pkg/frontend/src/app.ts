/** Page controller: search box -> tree view -> interactive leaf expansion.
 *
 * Stateless beyond view state; the server session store owns tree identity.
 * At most one mutation (expand) is in flight at a time — controls are
 * disabled while a request runs.
 */

import { ApiClient, ApiError, NetworkError } from "./api.js";
import { TreeViewModel } from "./model.js";
import { renderTree } from "./render.js";

export interface AppElements {
  search: HTMLInputElement;
  results: HTMLElement;
  tree: HTMLElement;
  banner: HTMLElement;
}

export class ExplorerApp {
  private vm: TreeViewModel | null = null;
  private mutationInFlight = false;
  private lastAction: (() => Promise<void>) | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly el: AppElements,
    private readonly levels = 2,
    private readonly degree = 3,
  ) {
    el.search.addEventListener("input", () => {
      void this.search(el.search.value);
    });
  }

  async search(query: string): Promise<void> {
    const names = await this.guarded(() => this.api.searchNodes(query));
    this.el.results.replaceChildren();
    if (names === undefined) return;
    for (const name of names) {
      const entry = document.createElement("div");
      entry.className = "search-result";
      entry.textContent = name;
      entry.addEventListener("click", () => void this.load(name));
      this.el.results.appendChild(entry);
    }
  }

  async load(node: string): Promise<void> {
    this.lastAction = () => this.load(node);
    const doc = await this.guarded(() =>
      this.api.getTree(node, this.levels, this.degree),
    );
    if (doc === undefined) return;
    this.vm = new TreeViewModel(doc);
    this.redraw();
  }

  async expand(position: number): Promise<void> {
    if (!this.vm || this.mutationInFlight) return;
    const vm = this.vm;
    this.lastAction = () => this.expand(position);
    this.mutationInFlight = true;
    this.setControlsDisabled(true);
    try {
      const doc = await this.guarded(() =>
        this.api.expand(vm.doc.tree_id, position, this.degree),
      );
      if (doc !== undefined) {
        this.vm = vm.withDoc(doc);
        this.redraw();
      }
    } finally {
      this.mutationInFlight = false;
      this.setControlsDisabled(false);
    }
  }

  toggle(position: number): void {
    if (!this.vm) return;
    this.vm.toggleCollapsed(position);
    this.redraw();
  }

  private redraw(): void {
    if (!this.vm) return;
    this.el.tree.replaceChildren(
      renderTree(this.vm, {
        onExpand: (pos) => void this.expand(pos),
        onToggle: (pos) => this.toggle(pos),
      }),
    );
  }

  private setControlsDisabled(disabled: boolean): void {
    for (const button of this.el.tree.querySelectorAll("button")) {
      (button as HTMLButtonElement).disabled = disabled;
    }
  }

  /** Runs an API call, routing failures to the error surfaces: network
   *  failures to the retryable banner, 4xx responses to an inline notice.
   *  Resolves `undefined` on failure so callers leave state untouched. */
  private async guarded<T>(call: () => Promise<T>): Promise<T | undefined> {
    this.el.banner.replaceChildren();
    this.el.banner.classList.remove("visible");
    try {
      return await call();
    } catch (err) {
      if (err instanceof NetworkError) {
        this.showRetryBanner(err.message);
      } else if (err instanceof ApiError) {
        this.showInlineError(err.message);
      } else {
        throw err;
      }
      return undefined;
    }
  }

  private showRetryBanner(message: string): void {
    this.el.banner.classList.add("visible");
    const text = document.createElement("span");
    text.textContent = message;
    const retry = document.createElement("button");
    retry.className = "retry-button";
    retry.textContent = "retry";
    retry.addEventListener("click", () => {
      if (this.lastAction) void this.lastAction();
    });
    this.el.banner.replaceChildren(text, retry);
  }

  private showInlineError(message: string): void {
    this.el.banner.classList.add("visible");
    const text = document.createElement("span");
    text.className = "inline-error";
    text.textContent = message;
    this.el.banner.replaceChildren(text);
  }
}
