// Active-learning labeling queue: uncertain items first, keyboard-driven,
// optimistic updates, periodic retrain.

import { ApiClient, ApiError, QueueItem } from "./api.js";

export const LABEL_CHOICES = ["accept", "reject", "settings", "other"] as const;
export type LabelChoice = (typeof LABEL_CHOICES)[number];

export interface QueueOptions {
  batchSize?: number;
  retrainEvery?: number;
}

type QueueStatus = "loading" | "ready" | "exhausted" | "error";

export class QueueController {
  readonly batchSize: number;
  readonly retrainEvery: number;

  items: QueueItem[] = [];
  status: QueueStatus = "loading";
  errorMessage = "";
  submittedSinceRetrain = 0;
  retrainCount = 0;
  private inFlight = new Set<string>();
  private failed = new Map<string, string>();

  constructor(
    private readonly api: ApiClient,
    private readonly root: HTMLElement,
    options: QueueOptions = {},
  ) {
    this.batchSize = options.batchSize ?? 10;
    this.retrainEvery = options.retrainEvery ?? 10;
    this.root.addEventListener("keydown", (event) => this.onKeydown(event as KeyboardEvent));
  }

  async refresh(): Promise<void> {
    this.status = "loading";
    this.render();
    try {
      this.items = await this.api.fetchQueue(this.batchSize);
      this.status = this.items.length === 0 ? "exhausted" : "ready";
    } catch (error) {
      this.status = "error";
      this.errorMessage = error instanceof Error ? error.message : String(error);
    }
    this.render();
  }

  async submit(text: string, label: LabelChoice): Promise<void> {
    if (this.inFlight.has(text)) return; // duplicate rapid submit suppressed
    const index = this.items.findIndex((item) => item.text === text);
    if (index === -1) return;
    const [removed] = this.items.splice(index, 1); // optimistic removal
    this.failed.delete(text);
    this.inFlight.add(text);
    this.render();
    try {
      await this.api.submitLabel(text, label);
      this.submittedSinceRetrain += 1;
      if (this.submittedSinceRetrain >= this.retrainEvery) {
        this.submittedSinceRetrain = 0;
        this.retrainCount += 1;
        await this.api.retrain();
        await this.refresh();
        return;
      }
      if (this.items.length === 0) {
        await this.refresh();
        return;
      }
    } catch (error) {
      // restore the item with an error annotation
      this.items.splice(Math.min(index, this.items.length), 0, removed);
      const message =
        error instanceof ApiError ? `rejected: ${error.message}` : "submit failed, retry";
      this.failed.set(text, message);
    } finally {
      this.inFlight.delete(text);
    }
    this.render();
  }

  skip(text: string): void {
    const index = this.items.findIndex((item) => item.text === text);
    if (index !== -1) {
      this.items.splice(index, 1);
      this.render();
    }
  }

  private onKeydown(event: KeyboardEvent): void {
    if (this.items.length === 0) return;
    const first = this.items[0];
    const choice = Number.parseInt(event.key, 10);
    if (choice >= 1 && choice <= 4) {
      void this.submit(first.text, LABEL_CHOICES[choice - 1]);
      event.preventDefault();
    } else if (event.key === "s") {
      this.skip(first.text);
      event.preventDefault();
    }
  }

  render(): void {
    this.root.textContent = "";
    const heading = document.createElement("h2");
    heading.textContent = "Labeling queue";
    this.root.appendChild(heading);

    if (this.status === "loading") {
      this.root.appendChild(this.message("loading-state", "Loading queue…"));
      return;
    }
    if (this.status === "error") {
      const banner = this.message("error-state", `Service unreachable: ${this.errorMessage}`);
      const retry = document.createElement("button");
      retry.className = "retry";
      retry.textContent = "Retry";
      retry.addEventListener("click", () => void this.refresh());
      banner.appendChild(retry);
      this.root.appendChild(banner);
      return;
    }
    if (this.status === "exhausted" || this.items.length === 0) {
      this.root.appendChild(
        this.message("exhausted-state", "Pool exhausted — nothing left to label."),
      );
      return;
    }

    const hint = document.createElement("p");
    hint.className = "hint";
    hint.textContent = "Keys 1–4 label the top item (accept/reject/settings/other), s skips.";
    this.root.appendChild(hint);

    const list = document.createElement("ol");
    list.className = "queue";
    for (const item of this.items) {
      list.appendChild(this.renderItem(item));
    }
    this.root.appendChild(list);

    const progress = document.createElement("p");
    progress.className = "retrain-progress";
    progress.textContent =
      `${this.submittedSinceRetrain}/${this.retrainEvery} labels until retrain ` +
      `(retrained ${this.retrainCount}×)`;
    this.root.appendChild(progress);
  }

  private renderItem(item: QueueItem): HTMLLIElement {
    const li = document.createElement("li");
    li.className = "queue-item";
    li.dataset.text = item.text;

    const text = document.createElement("span");
    text.className = "item-text";
    text.textContent = item.text;
    li.appendChild(text);

    const meta = document.createElement("span");
    meta.className = "item-meta";
    meta.textContent = `predicted ${item.predicted}, margin ${item.margin.toFixed(3)}`;
    li.appendChild(meta);

    const failure = this.failed.get(item.text);
    if (failure) {
      const note = document.createElement("span");
      note.className = "item-error";
      note.textContent = failure;
      li.appendChild(note);
    }

    for (const choice of LABEL_CHOICES) {
      const button = document.createElement("button");
      button.className = `label-btn label-${choice}`;
      button.textContent = choice;
      button.addEventListener("click", () => void this.submit(item.text, choice));
      li.appendChild(button);
    }
    const skip = document.createElement("button");
    skip.className = "label-btn label-skip";
    skip.textContent = "skip";
    skip.addEventListener("click", () => this.skip(item.text));
    li.appendChild(skip);
    return li;
  }

  private message(className: string, text: string): HTMLParagraphElement {
    const p = document.createElement("p");
    p.className = className;
    p.textContent = text;
    return p;
  }
}
