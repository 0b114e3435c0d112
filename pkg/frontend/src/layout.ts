/** Pure view math: bar geometry, threshold clamping, color scales, row order.
 *
 * Everything here only rearranges numbers the service already produced; no
 * analytics happen client-side.
 */

import type { FeatureMeta, WhatIfResponse } from "./api.js";

/** Centered diverging bar: presence grows right, absence left, half-column each. */
export function presenceBarWidths(
  fraction: number,
  columnWidth: number,
): { rightPx: number; leftPx: number } {
  const half = columnWidth / 2;
  return { rightPx: fraction * half, leftPx: (1 - fraction) * half };
}

/** Keep tau_neg <= tau_pos while dragging either handle. */
export function clampThresholds(
  tauPos: number,
  tauNeg: number,
  moved: "pos" | "neg",
): { tauPos: number; tauNeg: number } {
  tauPos = Math.min(1, Math.max(0, tauPos));
  tauNeg = Math.min(1, Math.max(0, tauNeg));
  if (tauNeg > tauPos) {
    if (moved === "pos") tauNeg = tauPos;
    else tauPos = tauNeg;
  }
  return { tauPos, tauNeg };
}

/** Row background: discriminativeness 0..1 mapped linearly to darkness. */
export function giniShade(value: number): string {
  const lightness = 97 - 57 * Math.min(1, Math.max(0, value));
  return `hsl(0, 0%, ${lightness.toFixed(2)}%)`;
}

/** Bar color from the true-label mix: blue (all 0) through red (all 1). */
export function labelMixColor(mix: number): string {
  const hue = 215 - 205 * Math.min(1, Math.max(0, mix));
  return `hsl(${hue.toFixed(1)}, 70%, 45%)`;
}

/** Map a prediction in [0, 1] to a background tint for sweep segments. */
export function scoreTint(value: number): string {
  const lightness = 95 - 50 * Math.min(1, Math.max(0, value));
  return `hsl(15, 75%, ${lightness.toFixed(2)}%)`;
}

export type SortMode = "importance" | "impactful" | "index" | "weight";

/** Feature-name order for the inspection list; all keys come from responses. */
export function sortFeatures(
  mode: SortMode,
  features: FeatureMeta[],
  whatif: WhatIfResponse | null,
): string[] {
  const names = features.map((f) => f.name);
  if (mode === "index" || whatif === null) return names;
  if (mode === "impactful") {
    return whatif.impactful.map((c) => c.feature);
  }
  if (mode === "weight") {
    const weight = new Map(features.map((f) => [f.name, f.weight ?? 0]));
    return [...names].sort((a, b) => (weight.get(b) ?? 0) - (weight.get(a) ?? 0));
  }
  return [...names].sort(
    (a, b) => (whatif.importance[b] ?? 0) - (whatif.importance[a] ?? 0),
  );
}

export function hasModelWeights(features: FeatureMeta[]): boolean {
  return features.some((f) => f.weight !== null);
}

/** Slider position fraction for a value over the feature's observed range. */
export function valueFraction(meta: FeatureMeta, value: number): number {
  const lo = meta.min ?? 0;
  const hi = meta.max ?? 1;
  if (hi === lo) return 0.5;
  return Math.min(1, Math.max(0, (value - lo) / (hi - lo)));
}

/** Grid segments outside the declared feasible set render grayed out. */
export function isFeasibleValue(meta: FeatureMeta, value: number): boolean {
  const feas = meta.feasible;
  if (feas === null) return true;
  if (feas.length === 2) return value >= feas[0] && value <= feas[1];
  return feas.includes(value);
}
