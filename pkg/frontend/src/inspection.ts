/** What-if inspection view: one slider row per feature over its sweep strip.
 *
 * Dragging a slider issues a debounced what-if request carrying the full
 * current vector; the service snaps infeasible values and the sliders are
 * reset from the echoed vector, so the UI can never display a value that
 * was not actually evaluated. The shown score always belongs to the last
 * evaluated vector.
 */

import { ApiClient, MetaResponse, PdpResponse, WhatIfResponse } from "./api.js";
import {
  hasModelWeights,
  isFeasibleValue,
  scoreTint,
  SortMode,
  sortFeatures,
  valueFraction,
} from "./layout.js";
import { debounce, LatestGate } from "./requests.js";

const DEBOUNCE_MS = 80;

export class InspectionView {
  readonly gate = new LatestGate();
  response: WhatIfResponse | null = null;
  sortMode: SortMode = "importance";

  private readonly pdp = new Map<string, PdpResponse>();
  private readonly sliders = new Map<string, HTMLInputElement>();
  private readonly valueLabels = new Map<string, HTMLElement>();
  private readonly importanceLabels = new Map<string, HTMLElement>();
  private readonly markers = new Map<string, HTMLElement>();
  private readonly rows = new Map<string, HTMLElement>();
  private scoreEl!: HTMLElement;
  private bannerEl!: HTMLElement;
  private listEl!: HTMLElement;
  private readonly requestUpdate = debounce(() => this.issue(), DEBOUNCE_MS);

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    readonly meta: MetaResponse,
    private readonly row: number = 0,
    private readonly trackWidth: number = 360,
  ) {}

  async init(): Promise<void> {
    for (const f of this.meta.features) {
      this.pdp.set(f.name, await this.api.getPdp(f.name));
    }
    this.buildSkeleton();
    await this.gate.run(
      () => this.api.postWhatIf({ values: {}, row: this.row }),
      (resp) => this.apply(resp),
      (err) => this.showError(err),
    );
  }

  /** Current slider positions as a full feature -> value map. */
  currentValues(): Record<string, number> {
    const values: Record<string, number> = {};
    for (const f of this.meta.features) {
      const slider = this.sliders.get(f.name)!;
      values[f.name] = Number(slider.value);
    }
    return values;
  }

  displayedScore(): number {
    return Number(this.scoreEl.dataset.score);
  }

  /** Flush any pending debounce and wait until all requests settled. */
  async settle(): Promise<void> {
    if (this.requestUpdate.pending()) this.requestUpdate.flush();
    await this.gate.whenIdle();
  }

  setSortMode(mode: SortMode): void {
    this.sortMode = mode;
    this.reorder();
  }

  private issue(): void {
    void this.gate.run(
      () => this.api.postWhatIf({ values: this.currentValues(), row: this.row }),
      (resp) => this.apply(resp),
      (err) => this.showError(err),
    );
  }

  private apply(resp: WhatIfResponse): void {
    this.response = resp;
    this.bannerEl.hidden = true;
    this.scoreEl.dataset.score = String(resp.score);
    this.scoreEl.textContent = resp.score.toFixed(4);
    for (const f of this.meta.features) {
      const value = resp.evaluated[f.index];
      const slider = this.sliders.get(f.name)!;
      slider.value = String(value); // snap-back to what was actually evaluated
      this.valueLabels.get(f.name)!.textContent = formatValue(value);
      this.importanceLabels.get(f.name)!.textContent =
        (resp.importance[f.name] ?? 0).toFixed(4);
    }
    for (const change of resp.impactful) {
      const marker = this.markers.get(change.feature);
      const meta = this.meta.features.find((f) => f.name === change.feature)!;
      if (marker) {
        marker.style.left = `${(valueFraction(meta, change.suggested_value) * 100).toFixed(3)}%`;
        marker.title = `suggest ${formatValue(change.suggested_value)} (delta ${change.delta.toFixed(4)})`;
        marker.hidden = this.sortMode !== "impactful";
      }
    }
    this.reorder();
  }

  private showError(err: unknown): void {
    // non-blocking: last state stays on screen
    this.bannerEl.hidden = false;
    this.bannerEl.textContent = `service unreachable: ${String(err)}`;
  }

  private buildSkeleton(): void {
    this.root.textContent = "";
    const head = el("div", "inspect-head");
    const scoreWrap = el("div", "score-wrap");
    scoreWrap.append("prediction: ");
    this.scoreEl = el("span", "score");
    this.scoreEl.id = "live-score";
    scoreWrap.append(this.scoreEl);
    head.append(scoreWrap);

    const sortWrap = el("label", "sort-wrap");
    sortWrap.append("sort by ");
    const select = document.createElement("select");
    select.id = "sort-mode";
    const modes: [SortMode, string, boolean][] = [
      ["importance", "local importance", true],
      ["impactful", "impactful change", true],
      ["index", "feature order", true],
      ["weight", "model weight", hasModelWeights(this.meta.features)],
    ];
    for (const [mode, label, enabled] of modes) {
      const opt = document.createElement("option");
      opt.value = mode;
      opt.textContent = label;
      opt.disabled = !enabled;
      select.append(opt);
    }
    select.value = this.sortMode;
    select.addEventListener("change", () => this.setSortMode(select.value as SortMode));
    sortWrap.append(select);
    head.append(sortWrap);

    this.bannerEl = el("div", "banner");
    this.bannerEl.hidden = true;
    head.append(this.bannerEl);
    this.root.append(head);

    this.listEl = el("div", "feature-list");
    this.root.append(this.listEl);
    for (const f of this.meta.features) {
      this.listEl.append(this.buildRow(f.name));
    }
  }

  private buildRow(name: string): HTMLElement {
    const meta = this.meta.features.find((f) => f.name === name)!;
    const curve = this.pdp.get(name)!;
    const row = el("div", "feature-row");
    row.dataset.feature = name;

    const head = el("div", "feature-head");
    const label = el("span", "feature-name");
    label.textContent = name;
    const importance = el("span", "feature-importance");
    this.importanceLabels.set(name, importance);
    head.append(label, importance);
    row.append(head);

    const track = el("div", "track");
    track.style.width = `${this.trackWidth}px`;

    const strip = el("div", "strip");
    const maxCount = Math.max(...curve.histogram.counts, 1);
    curve.grid.forEach((v, i) => {
      const seg = el("span", "segment");
      seg.style.background = scoreTint(curve.values[i]);
      if (!isFeasibleValue(meta, v)) seg.classList.add("infeasible");
      seg.title = `${name}=${formatValue(v)} -> ${curve.values[i].toFixed(4)}`;
      strip.append(seg);
    });
    track.append(strip);

    const hist = el("div", "hist");
    curve.histogram.counts.forEach((c) => {
      const bar = el("span", "hist-bar");
      bar.style.height = `${((c / maxCount) * 100).toFixed(1)}%`;
      hist.append(bar);
    });
    track.append(hist);

    const slider = document.createElement("input");
    slider.type = "range";
    slider.className = "slider";
    slider.min = String(meta.min ?? 0);
    slider.max = String(meta.max ?? 1);
    slider.step = "any";
    slider.addEventListener("input", () => {
      this.valueLabels.get(name)!.textContent = formatValue(Number(slider.value));
      this.requestUpdate();
    });
    this.sliders.set(name, slider);
    track.append(slider);

    const marker = el("span", "suggest-marker");
    marker.hidden = true;
    this.markers.set(name, marker);
    track.append(marker);

    row.append(track);

    const value = el("span", "feature-value");
    this.valueLabels.set(name, value);
    row.append(value);

    this.rows.set(name, row);
    return row;
  }

  private reorder(): void {
    const order = sortFeatures(this.sortMode, this.meta.features, this.response);
    for (const name of order) {
      const row = this.rows.get(name);
      if (row) this.listEl.append(row); // re-append moves the node to the end
    }
    for (const [name, marker] of this.markers) {
      void name;
      marker.hidden = this.sortMode !== "impactful" || this.response === null;
    }
  }
}

function el(tag: string, className: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  return node;
}

function formatValue(v: number): string {
  return Number.isInteger(v) ? String(v) : v.toFixed(3);
}
