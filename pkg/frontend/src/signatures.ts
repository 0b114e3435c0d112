/** Signature exploration: threshold picking on the score curves, then a
 * column per cluster with centered presence/absence bars, discriminativeness
 * shading, and a projection thumbnail highlighting the cluster's members.
 */

import {
  ApiClient,
  ContingencyResponse,
  CurvesResponse,
  MetaResponse,
  SignaturesResponse,
} from "./api.js";
import {
  clampThresholds,
  giniShade,
  labelMixColor,
  presenceBarWidths,
} from "./layout.js";
import { debounce, LatestGate } from "./requests.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const CHART = 120;

export class SignaturesView {
  readonly previewGate = new LatestGate();
  readonly applyGate = new LatestGate();
  tauPos = 0.8;
  tauNeg = 0.2;
  curves: CurvesResponse | null = null;
  signature: SignaturesResponse | null = null;

  private posInput!: HTMLInputElement;
  private negInput!: HTMLInputElement;
  private readonly contingencyEls = new Map<string, HTMLElement>();
  private columnsEl!: HTMLElement;
  private noticeEl!: HTMLElement;
  private readonly previewUpdate = debounce(() => this.refreshPreview(), 120);

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly meta: MetaResponse,
    readonly columnWidth: number = 300,
  ) {}

  async init(): Promise<void> {
    this.curves = await this.api.getCurves();
    this.build();
    this.refreshPreview();
  }

  /** Drag one handle; the pair can never cross. */
  setThreshold(which: "pos" | "neg", value: number): void {
    const next = clampThresholds(
      which === "pos" ? value : this.tauPos,
      which === "neg" ? value : this.tauNeg,
      which,
    );
    this.tauPos = next.tauPos;
    this.tauNeg = next.tauNeg;
    this.posInput.value = String(this.tauPos);
    this.negInput.value = String(this.tauNeg);
    this.previewUpdate();
  }

  async apply(): Promise<void> {
    await this.applyGate.run(
      () =>
        this.api.postSignatures({
          tau_pos: this.tauPos,
          tau_neg: this.tauNeg,
          k_pos: "auto",
          k_neg: "auto",
        }),
      (sig) => {
        this.signature = sig;
        this.noticeEl.hidden = true;
        this.renderColumns(sig);
      },
      (err) => {
        this.noticeEl.hidden = false;
        this.noticeEl.textContent =
          err instanceof Error && err.message
            ? `${err.message} — try widening the thresholds`
            : "signature request failed";
      },
    );
  }

  async settle(): Promise<void> {
    if (this.previewUpdate.pending()) this.previewUpdate.flush();
    await this.previewGate.whenIdle();
    await this.applyGate.whenIdle();
  }

  private refreshPreview(): void {
    void this.previewGate.run(
      async () => {
        const pos = await this.api.getContingency(this.tauPos);
        const neg = await this.api.getContingency(this.tauNeg);
        return { pos, neg };
      },
      ({ pos, neg }) => {
        this.renderContingency("pos", pos);
        this.renderContingency("neg", neg);
      },
    );
  }

  private build(): void {
    this.root.textContent = "";
    const charts = el("div", "charts");
    const curves = this.curves!;
    charts.append(
      lineChart("ROC", curves.fpr, curves.tpr, `auc ${curves.auc.toFixed(3)}`),
      lineChart("precision-recall", curves.recall, curves.precision, ""),
      lineChart(
        "accuracy",
        curves.thresholds.map((t) => 1 - t),
        curves.accuracy,
        "",
      ),
    );
    this.root.append(charts);

    const controls = el("div", "threshold-controls");
    this.posInput = thresholdSlider("tau-pos", this.tauPos);
    this.posInput.addEventListener("input", () =>
      this.setThreshold("pos", Number(this.posInput.value)),
    );
    this.negInput = thresholdSlider("tau-neg", this.tauNeg);
    this.negInput.addEventListener("input", () =>
      this.setThreshold("neg", Number(this.negInput.value)),
    );
    const posLabel = el("label", "threshold");
    posLabel.append("strong positive >= ", this.posInput);
    const negLabel = el("label", "threshold");
    negLabel.append("strong negative <= ", this.negInput);
    controls.append(posLabel, negLabel);

    for (const which of ["pos", "neg"] as const) {
      const matrix = el("div", "contingency");
      matrix.dataset.which = which;
      this.contingencyEls.set(which, matrix);
      controls.append(matrix);
    }

    const applyBtn = document.createElement("button");
    applyBtn.id = "apply-signatures";
    applyBtn.textContent = "build signatures";
    applyBtn.addEventListener("click", () => void this.apply());
    controls.append(applyBtn);

    this.noticeEl = el("div", "notice");
    this.noticeEl.hidden = true;
    controls.append(this.noticeEl);
    this.root.append(controls);

    this.columnsEl = el("div", "signature-columns");
    this.root.append(this.columnsEl);
  }

  private renderContingency(which: string, cm: ContingencyResponse): void {
    const node = this.contingencyEls.get(which)!;
    node.textContent = "";
    const title = el("div", "contingency-title");
    title.textContent = which === "pos" ? "at tau_pos" : "at tau_neg";
    node.append(title);
    for (const [key, value] of Object.entries(cm)) {
      const cell = el("span", `cm-cell cm-${key}`);
      cell.textContent = `${key.toUpperCase()} ${value}`;
      node.append(cell);
    }
  }

  private renderColumns(sig: SignaturesResponse): void {
    this.columnsEl.textContent = "";
    const byRow = new Map(sig.retained.map((r, i) => [r, sig.projection[i]]));
    const xs = sig.projection.map((p) => p[0]);
    const ys = sig.projection.map((p) => p[1]);
    const bounds = {
      x0: Math.min(...xs),
      x1: Math.max(...xs),
      y0: Math.min(...ys),
      y1: Math.max(...ys),
    };
    sig.clusters.forEach((cluster, cid) => {
      const col = el("div", "signature-column");
      col.dataset.cluster = String(cid);
      col.style.width = `${this.columnWidth}px`;

      const head = el("div", "column-head");
      head.textContent = `${cluster.side} · ${cluster.members.length} items`;
      head.style.color = labelMixColor(cluster.label_mix);
      col.append(head);

      col.append(
        projectionThumb(sig, new Set(cluster.members), byRow, bounds),
      );

      this.meta.features.forEach((feature, f) => {
        const row = el("div", "signature-row");
        row.dataset.feature = feature.name;
        row.style.background = giniShade(sig.discriminativeness[cid][f]);
        row.style.width = `${this.columnWidth}px`;

        const name = el("span", "signature-feature");
        name.textContent = feature.name;
        row.append(name);

        const bar = el("div", "diverging-bar");
        const { rightPx, leftPx } = presenceBarWidths(
          cluster.presence[f],
          this.columnWidth,
        );
        const left = el("span", "bar-left");
        left.style.width = `${leftPx}px`;
        const right = el("span", "bar-right");
        right.style.width = `${rightPx}px`;
        right.style.background = labelMixColor(cluster.label_mix);
        left.style.background = labelMixColor(cluster.label_mix);
        left.style.opacity = "0.45";
        bar.append(left, el("span", "bar-mid"), right);
        row.append(bar);
        col.append(row);
      });
      this.columnsEl.append(col);
    });
  }
}

function thresholdSlider(id: string, value: number): HTMLInputElement {
  const input = document.createElement("input");
  input.type = "range";
  input.id = id;
  input.min = "0";
  input.max = "1";
  input.step = "0.01";
  input.value = String(value);
  return input;
}

function lineChart(title: string, xs: number[], ys: number[], note: string): HTMLElement {
  const wrap = el("div", "chart");
  const caption = el("div", "chart-title");
  caption.textContent = note ? `${title} (${note})` : title;
  wrap.append(caption);
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${CHART} ${CHART}`);
  svg.setAttribute("width", String(CHART));
  svg.setAttribute("height", String(CHART));
  const points = [...xs.keys()]
    .map((i) => `${(xs[i] * CHART).toFixed(1)},${((1 - ys[i]) * CHART).toFixed(1)}`)
    .join(" ");
  const line = document.createElementNS(SVG_NS, "polyline");
  line.setAttribute("points", points);
  line.setAttribute("fill", "none");
  line.setAttribute("stroke", "#2563eb");
  line.setAttribute("stroke-width", "1.5");
  svg.append(line);
  wrap.append(svg);
  return wrap;
}

function projectionThumb(
  sig: SignaturesResponse,
  members: Set<number>,
  byRow: Map<number, number[]>,
  bounds: { x0: number; x1: number; y0: number; y1: number },
): HTMLElement {
  const wrap = el("div", "projection");
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${CHART} ${CHART}`);
  svg.setAttribute("width", String(CHART));
  svg.setAttribute("height", String(CHART));
  const sx = (x: number) =>
    bounds.x1 === bounds.x0 ? CHART / 2 : ((x - bounds.x0) / (bounds.x1 - bounds.x0)) * (CHART - 8) + 4;
  const sy = (y: number) =>
    bounds.y1 === bounds.y0 ? CHART / 2 : ((y - bounds.y0) / (bounds.y1 - bounds.y0)) * (CHART - 8) + 4;
  for (const row of sig.retained) {
    const p = byRow.get(row)!;
    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", sx(p[0]).toFixed(1));
    dot.setAttribute("cy", sy(p[1]).toFixed(1));
    dot.setAttribute("r", members.has(row) ? "2.5" : "1.5");
    dot.setAttribute("fill", members.has(row) ? "#dc2626" : "#cbd5e1");
    svg.append(dot);
  }
  wrap.append(svg);
  return wrap;
}

function el(tag: string, className: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  return node;
}
