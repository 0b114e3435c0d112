/** App entry: one base-URL setting, two workflow tabs. */

import { ApiClient } from "./api.js";
import { InspectionView } from "./inspection.js";
import { SignaturesView } from "./signatures.js";

export function resolveBaseUrl(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("api") ?? "http://127.0.0.1:8321";
}

export async function boot(root: HTMLElement, baseUrl: string): Promise<void> {
  const api = new ApiClient(baseUrl);
  const meta = await api.getMeta();

  const header = document.createElement("header");
  const title = document.createElement("h1");
  title.textContent = "boxlens";
  const subtitle = document.createElement("p");
  subtitle.textContent = `${meta.model} · ${meta.n_rows} rows · ${meta.features.length} features`;
  header.append(title, subtitle);
  root.append(header);

  const nav = document.createElement("nav");
  const inspectBtn = tabButton("inspect", true);
  const signaturesBtn = tabButton("signatures", false);
  nav.append(inspectBtn, signaturesBtn);
  root.append(nav);

  const inspectPane = document.createElement("section");
  inspectPane.id = "inspect-pane";
  const signaturesPane = document.createElement("section");
  signaturesPane.id = "signatures-pane";
  signaturesPane.hidden = true;
  root.append(inspectPane, signaturesPane);

  const inspection = new InspectionView(inspectPane, api, meta);
  await inspection.init();
  let signatures: SignaturesView | null = null;

  inspectBtn.addEventListener("click", () => {
    inspectPane.hidden = false;
    signaturesPane.hidden = true;
    setActive(inspectBtn, signaturesBtn);
  });
  signaturesBtn.addEventListener("click", () => {
    void (async () => {
      if (signatures === null) {
        signatures = new SignaturesView(signaturesPane, api, meta);
        await signatures.init();
      }
      inspectPane.hidden = true;
      signaturesPane.hidden = false;
      setActive(signaturesBtn, inspectBtn);
    })();
  });
}

function tabButton(label: string, active: boolean): HTMLButtonElement {
  const btn = document.createElement("button");
  btn.textContent = label;
  btn.className = active ? "tab active" : "tab";
  return btn;
}

function setActive(on: HTMLButtonElement, off: HTMLButtonElement): void {
  on.classList.add("active");
  off.classList.remove("active");
}

declare global {
  interface Window {
    __boxlensBooted?: Promise<void>;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  window.__boxlensBooted = boot(document.getElementById("app")!, resolveBaseUrl());
}
