// App shell: tab switch between the labeling queue and the findings browser.

import { ApiClient } from "./api.js";
import { FindingsController } from "./findings.js";
import { QueueController } from "./queue.js";

function configFromQuery(): { retrainEvery: number; batchSize: number } {
  const params = new URLSearchParams(window.location.search);
  const retrainEvery = Number.parseInt(params.get("retrain") ?? "", 10);
  const batchSize = Number.parseInt(params.get("batch") ?? "", 10);
  return {
    retrainEvery: Number.isFinite(retrainEvery) && retrainEvery > 0 ? retrainEvery : 10,
    batchSize: Number.isFinite(batchSize) && batchSize > 0 ? batchSize : 10,
  };
}

export function bootstrap(root: HTMLElement): void {
  const api = new ApiClient("");
  const config = configFromQuery();

  const tabs = document.createElement("nav");
  tabs.className = "tabs";
  const queuePane = document.createElement("section");
  queuePane.className = "pane queue-pane";
  queuePane.tabIndex = 0;
  const findingsPane = document.createElement("section");
  findingsPane.className = "pane findings-pane";
  findingsPane.hidden = true;

  const queue = new QueueController(api, queuePane, config);
  const findings = new FindingsController(api, findingsPane);

  const queueTab = document.createElement("button");
  queueTab.textContent = "Queue";
  queueTab.className = "tab active";
  const findingsTab = document.createElement("button");
  findingsTab.textContent = "Findings";
  findingsTab.className = "tab";

  queueTab.addEventListener("click", () => {
    queuePane.hidden = false;
    findingsPane.hidden = true;
    queueTab.classList.add("active");
    findingsTab.classList.remove("active");
    void queue.refresh();
  });
  findingsTab.addEventListener("click", () => {
    queuePane.hidden = true;
    findingsPane.hidden = false;
    findingsTab.classList.add("active");
    queueTab.classList.remove("active");
    void findings.refresh();
  });

  tabs.appendChild(queueTab);
  tabs.appendChild(findingsTab);
  root.appendChild(tabs);
  root.appendChild(queuePane);
  root.appendChild(findingsPane);

  void queue.refresh();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  bootstrap(document.getElementById("app") as HTMLElement);
}
