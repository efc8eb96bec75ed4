// Findings dashboard: severity-filterable table plus a sandboxed preview of
// the annotated page (scripts never run inside the preview frame).

import { ApiClient, FindingRow } from "./api.js";

type SeverityFilter = "all" | "warning" | "notice";

export class FindingsController {
  findings: FindingRow[] = [];
  filter: SeverityFilter = "all";
  status: "loading" | "ready" | "error" = "loading";
  errorMessage = "";
  selected: FindingRow | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly root: HTMLElement,
  ) {}

  async refresh(): Promise<void> {
    this.status = "loading";
    this.render();
    try {
      this.findings = await this.api.fetchFindings();
      this.status = "ready";
    } catch (error) {
      this.status = "error";
      this.errorMessage = error instanceof Error ? error.message : String(error);
    }
    this.render();
  }

  visibleFindings(): FindingRow[] {
    if (this.filter === "all") return this.findings;
    return this.findings.filter((f) => f.severity === this.filter);
  }

  setFilter(filter: SeverityFilter): void {
    this.filter = filter;
    this.render();
  }

  async select(finding: FindingRow): Promise<void> {
    this.selected = finding;
    this.render();
    const frame = this.root.querySelector<HTMLIFrameElement>("iframe.preview");
    const placeholder = this.root.querySelector<HTMLElement>(".preview-placeholder");
    if (!frame || !placeholder) return;
    const html = await this.api.fetchAnnotatedPage(finding.entry_id).catch(() => null);
    if (html === null) {
      frame.hidden = true;
      placeholder.hidden = false;
      placeholder.textContent = "No annotated page available for this entry.";
    } else {
      // srcdoc + sandbox: the annotated page renders but its scripts never run
      frame.srcdoc = html;
      frame.hidden = false;
      placeholder.hidden = true;
    }
  }

  render(): void {
    this.root.textContent = "";
    const heading = document.createElement("h2");
    heading.textContent = "Findings";
    this.root.appendChild(heading);

    if (this.status === "loading") {
      this.root.appendChild(this.message("loading-state", "Loading findings…"));
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

    this.root.appendChild(this.renderFilter());

    const visible = this.visibleFindings();
    if (visible.length === 0) {
      this.root.appendChild(this.message("empty-state", "No findings for this filter."));
    } else {
      this.root.appendChild(this.renderTable(visible));
    }

    const frame = document.createElement("iframe");
    frame.className = "preview";
    frame.setAttribute("sandbox", ""); // all restrictions: no scripts, no navigation
    frame.hidden = this.selected === null;
    const placeholder = document.createElement("p");
    placeholder.className = "preview-placeholder";
    placeholder.hidden = this.selected !== null;
    placeholder.textContent = "Select a finding to preview the annotated page.";
    this.root.appendChild(frame);
    this.root.appendChild(placeholder);
  }

  private renderFilter(): HTMLElement {
    const bar = document.createElement("div");
    bar.className = "filter-bar";
    for (const value of ["all", "warning", "notice"] as const) {
      const button = document.createElement("button");
      button.className = `filter-btn filter-${value}` + (this.filter === value ? " active" : "");
      button.textContent = value;
      button.addEventListener("click", () => this.setFilter(value));
      bar.appendChild(button);
    }
    return bar;
  }

  private renderTable(rows: FindingRow[]): HTMLTableElement {
    const table = document.createElement("table");
    table.className = "findings";
    const head = table.createTHead().insertRow();
    for (const title of ["page", "kind", "severity", "score"]) {
      const th = document.createElement("th");
      th.textContent = title;
      head.appendChild(th);
    }
    const body = table.createTBody();
    for (const finding of rows) {
      const tr = body.insertRow();
      tr.className = `finding severity-${finding.severity}`;
      tr.dataset.entryId = finding.entry_id;
      tr.insertCell().textContent = finding.url;
      tr.insertCell().textContent = finding.kind;
      const severity = tr.insertCell();
      severity.textContent = finding.severity;
      severity.className = `badge badge-${finding.severity}`;
      tr.insertCell().textContent =
        finding.score_total === null ? "—" : finding.score_total.toFixed(1);
      tr.addEventListener("click", () => void this.select(finding));
    }
    return table;
  }

  private message(className: string, text: string): HTMLParagraphElement {
    const p = document.createElement("p");
    p.className = className;
    p.textContent = text;
    return p;
  }
}
