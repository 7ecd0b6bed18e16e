/**
 * Histogram overlay: Monte Carlo outcome bins (bars with error whiskers)
 * against the analytic bin-averaged density from the companion file, with
 * bins disagreeing beyond three standard errors highlighted.
 */
import type { CsvFile } from "./csv.js";
import { numericColumn, requireSection } from "./csv.js";
import type { Scene, Stroke } from "./scene.js";
import { AXIS_COLOR, OUTLIER_COLOR, makeFrame, padLinearDomain } from "./scene.js";

export interface OverlayResult {
  scene: Scene;
  bins: number;
  outliers: number;
  outlierFraction: number;
}

const BAR_FILL = "#9ECAE8";
const GRID_TOLERANCE = 1e-9;

export function buildOverlay(histFile: CsvFile, densityFile: CsvFile): OverlayResult {
  const hist = requireSection(histFile, "histogram");
  const density = requireSection(densityFile, "density");

  const lo = numericColumn(hist, "bin_lo");
  const hi = numericColumn(hist, "bin_hi");
  const counts = numericColumn(hist, "count");
  const mcDensity = numericColumn(hist, "density");
  const sigma = numericColumn(hist, "sigma");
  const refLo = numericColumn(density, "bin_lo");
  const refHi = numericColumn(density, "bin_hi");
  const refDensity = numericColumn(density, "density");

  if (lo.length !== refLo.length) {
    throw new Error(`bin-grid mismatch: ${lo.length} histogram bins vs ${refLo.length} density bins`);
  }
  for (let i = 0; i < lo.length; i += 1) {
    if (Math.abs(lo[i]! - refLo[i]!) > GRID_TOLERANCE || Math.abs(hi[i]! - refHi[i]!) > GRID_TOLERANCE) {
      throw new Error(`bin-grid mismatch at bin ${i}: [${lo[i]}, ${hi[i]}] vs [${refLo[i]}, ${refHi[i]}]`);
    }
  }

  const total = counts.reduce((a, b) => a + b, 0);
  if (total <= 0) throw new Error("histogram holds no samples");

  // Empty bins report sigma = 0; use the one-count Poisson floor so the
  // outlier rule stays meaningful in the tails.
  const outlierFlags = lo.map((_, i) => {
    const width = hi[i]! - lo[i]!;
    const floor = Math.sqrt(Math.max(counts[i]!, 1)) / (total * width);
    return Math.abs(mcDensity[i]! - refDensity[i]!) > 3 * Math.max(sigma[i]!, floor);
  });
  const outliers = outlierFlags.filter(Boolean).length;

  const yMax = Math.max(...mcDensity, ...refDensity);
  const frame = makeFrame({
    xLabel: "homodyne outcome x",
    yLabel: "density",
    xDomain: [lo[0]!, hi[hi.length - 1]!],
    yDomain: padLinearDomain(0, yMax === 0 ? 1 : yMax),
  });
  const base = frame.y.toPixel(0);

  for (let i = 0; i < lo.length; i += 1) {
    const x0 = frame.x.toPixel(lo[i]!);
    const x1 = frame.x.toPixel(hi[i]!);
    const top = frame.y.toPixel(mcDensity[i]!);
    if (mcDensity[i]! > 0) {
      frame.scene.items.push({
        kind: "rect",
        x: x0,
        y: top,
        width: Math.max(1, x1 - x0 - 0.5),
        height: base - top,
        fill: outlierFlags[i] ? OUTLIER_COLOR : BAR_FILL,
      });
    }
    if (sigma[i]! > 0) {
      const center = (x0 + x1) / 2;
      const whisker: Stroke = { color: AXIS_COLOR, width: 1 };
      frame.scene.items.push({
        kind: "segment",
        x1: center,
        y1: frame.y.toPixel(mcDensity[i]! - sigma[i]!),
        x2: center,
        y2: frame.y.toPixel(mcDensity[i]! + sigma[i]!),
        stroke: whisker,
      });
    }
  }

  frame.scene.items.push({
    kind: "polyline",
    points: lo.map((_, i) => [
      frame.x.toPixel((lo[i]! + hi[i]!) / 2),
      frame.y.toPixel(refDensity[i]!),
    ]),
    stroke: { color: "#000000", width: 2 },
  });
  frame.scene.items.push({
    kind: "text",
    x: frame.plot.right - 8,
    y: frame.plot.top + 14,
    text: `MC bars vs analytic line (${outliers} outlier bins)`,
    size: 11,
    anchor: "end",
    color: AXIS_COLOR,
  });

  return {
    scene: frame.scene,
    bins: lo.length,
    outliers,
    outlierFraction: outliers / lo.length,
  };
}
