/**
 * Log-log rendering of the optimized error-probability curves: one solid
 * line per success probability (ascending) plus a dashed line for the
 * repeat-until-success bound, straight from a `cavityqnd curve` CSV.
 */
import type { CsvFile } from "./csv.js";
import { numericColumn, requireSection, stringColumn } from "./csv.js";
import type { Scene, Stroke } from "./scene.js";
import { AXIS_COLOR, PALETTE, makeFrame, padLogDomain } from "./scene.js";

export interface CurveSeries {
  mode: string;
  targetPs: number;
  /** (cooperativity, error) pairs sorted by cooperativity */
  points: Array<[number, number]>;
  stroke: Stroke;
  label: string;
}

export interface Fig2Result {
  scene: Scene;
  series: CurveSeries[];
  warnings: string[];
}

const BOUND_DASH = [7, 4];

export function buildFig2(file: CsvFile): Fig2Result {
  const section = requireSection(file, "default");
  const cooperativity = numericColumn(section, "cooperativity");
  const targetPs = numericColumn(section, "target_ps");
  const mode = stringColumn(section, "mode");
  const error = numericColumn(section, "error");

  const warnings: string[] = [];
  const groups = new Map<string, Array<[number, number]>>();
  for (let i = 0; i < cooperativity.length; i += 1) {
    if (!(error[i]! > 0)) {
      warnings.push(`dropping nonpositive error at C=${cooperativity[i]} (log axis)`);
      continue;
    }
    const key = `${mode[i]}@${targetPs[i]}`;
    const list = groups.get(key) ?? [];
    list.push([cooperativity[i]!, error[i]!]);
    groups.set(key, list);
  }

  const entries = [...groups.entries()]
    .map(([key, points]) => {
      const [modeName, ps] = key.split("@");
      points.sort((a, b) => a[0] - b[0]);
      return { modeName: modeName!, ps: Number(ps), points };
    })
    .filter((entry) => {
      if (entry.points.length < 2) {
        warnings.push(`group ${entry.modeName} P_s=${entry.ps} has fewer than 2 points; skipped`);
        return false;
      }
      return true;
    });
  if (entries.length === 0) {
    throw new Error("curve file contains no plottable series");
  }

  const singles = entries.filter((e) => e.modeName === "single_shot").sort((a, b) => a.ps - b.ps);
  const bounds = entries.filter((e) => e.modeName !== "single_shot").sort((a, b) => a.ps - b.ps);

  const series: CurveSeries[] = [];
  singles.forEach((entry, index) => {
    series.push({
      mode: entry.modeName,
      targetPs: entry.ps,
      points: entry.points,
      stroke: { color: PALETTE[index % PALETTE.length]!, width: 2 },
      label: `Ps=${formatPercent(entry.ps)}`,
    });
  });
  bounds.forEach((entry) => {
    series.push({
      mode: entry.modeName,
      targetPs: entry.ps,
      points: entry.points,
      stroke: { color: AXIS_COLOR, width: 2, dash: BOUND_DASH },
      label: `bound (Ps=${formatPercent(entry.ps)})`,
    });
  });

  const xs = series.flatMap((s) => s.points.map((p) => p[0]));
  const ys = series.flatMap((s) => s.points.map((p) => p[1]));
  const frame = makeFrame({
    xLabel: "cooperativity g^2/(kappa gamma)",
    yLabel: "error probability 1 - F",
    xLog: true,
    yLog: true,
    xDomain: padLogDomain(Math.min(...xs), Math.max(...xs)),
    yDomain: padLogDomain(Math.min(...ys), Math.max(...ys)),
  });

  for (const s of series) {
    frame.scene.items.push({
      kind: "polyline",
      points: s.points.map(([c, e]) => [frame.x.toPixel(c), frame.y.toPixel(e)]),
      stroke: s.stroke,
    });
  }
  // legend, top-right inside the plot area
  series.forEach((s, index) => {
    const y = frame.plot.top + 16 + 16 * index;
    const x = frame.plot.right - 150;
    frame.scene.items.push(
      { kind: "segment", x1: x, y1: y - 4, x2: x + 26, y2: y - 4, stroke: s.stroke },
      { kind: "text", x: x + 32, y, text: s.label, size: 11, anchor: "start", color: AXIS_COLOR },
    );
  });

  return { scene: frame.scene, series, warnings };
}

function formatPercent(ps: number): string {
  const percent = 100 * ps;
  const text = percent < 1 ? percent.toPrecision(1) : Number(percent.toPrecision(3)).toString();
  return `${text}%`;
}
