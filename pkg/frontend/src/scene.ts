/**
 * Backend-independent plot description: scales, axes and drawing primitives.
 * fig2/overlay build a Scene; svg.ts and png.ts render it.
 */

export interface Stroke {
  color: string;
  width: number;
  /** on/off pixel run lengths; omit for solid lines */
  dash?: number[];
}

export interface PolylineItem {
  kind: "polyline";
  points: Array<[number, number]>;
  stroke: Stroke;
}

export interface SegmentItem {
  kind: "segment";
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  stroke: Stroke;
}

export interface RectItem {
  kind: "rect";
  x: number;
  y: number;
  width: number;
  height: number;
  fill: string;
}

export interface TextItem {
  kind: "text";
  x: number;
  y: number;
  text: string;
  size: number;
  anchor: "start" | "middle" | "end";
  color: string;
  /** degrees, counterclockwise about (x, y) */
  rotate?: number;
}

export type SceneItem = PolylineItem | SegmentItem | RectItem | TextItem;

export interface Scene {
  width: number;
  height: number;
  background: string;
  items: SceneItem[];
}

/** Okabe-Ito colorblind-safe palette. */
export const PALETTE = ["#0072B2", "#E69F00", "#009E73", "#CC79A7", "#56B4E9", "#D55E00"];
export const OUTLIER_COLOR = "#D55E00";
export const AXIS_COLOR = "#202020";

export interface Scale {
  toPixel(value: number): number;
  ticks(): number[];
  format(value: number): string;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  if (!(d1 > d0)) throw new Error(`degenerate linear domain [${d0}, ${d1}]`);
  const slope = (r1 - r0) / (d1 - d0);
  const step = niceStep((d1 - d0) / 6);
  return {
    toPixel: (v) => r0 + (v - d0) * slope,
    ticks: () => {
      const ticks: number[] = [];
      for (let v = Math.ceil(d0 / step) * step; v <= d1 + 1e-12 * step; v += step) {
        ticks.push(Math.abs(v) < 1e-12 * step ? 0 : v);
      }
      return ticks;
    },
    format: (v) => formatTick(v),
  };
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  if (!(d0 > 0 && d1 > d0)) throw new Error(`log scale needs 0 < lo < hi, got [${d0}, ${d1}]`);
  const inner = linearScale([Math.log10(d0), Math.log10(d1)], range);
  return {
    toPixel: (v) => inner.toPixel(Math.log10(v)),
    ticks: () => {
      const ticks: number[] = [];
      for (let e = Math.ceil(Math.log10(d0) - 1e-9); e <= Math.log10(d1) + 1e-9; e += 1) {
        ticks.push(10 ** e);
      }
      return ticks;
    },
    format: (v) => `1e${Math.round(Math.log10(v))}`,
  };
}

function niceStep(rough: number): number {
  const power = 10 ** Math.floor(Math.log10(rough));
  const mantissa = rough / power;
  const nice = mantissa < 1.5 ? 1 : mantissa < 3.5 ? 2 : mantissa < 7.5 ? 5 : 10;
  return nice * power;
}

function formatTick(v: number): string {
  if (v === 0) return "0";
  const magnitude = Math.abs(v);
  if (magnitude >= 1e4 || magnitude < 1e-3) return v.toExponential(0).replace("+", "");
  return Number(v.toPrecision(6)).toString();
}

export interface Frame {
  scene: Scene;
  x: Scale;
  y: Scale;
  plot: { left: number; top: number; right: number; bottom: number };
}

export interface FrameOptions {
  width?: number;
  height?: number;
  xLabel: string;
  yLabel: string;
  xLog?: boolean;
  yLog?: boolean;
  xDomain: [number, number];
  yDomain: [number, number];
  title?: string;
}

const FONT_SIZE = 12;

/** Axes, ticks, labels and background; plotting area with 10% padding. */
export function makeFrame(options: FrameOptions): Frame {
  const width = options.width ?? 640;
  const height = options.height ?? 440;
  const plot = { left: 64, top: options.title ? 36 : 16, right: width - 16, bottom: height - 48 };
  const makeScale = (log: boolean | undefined, domain: [number, number], range: [number, number]) =>
    log ? logScale(domain, range) : linearScale(domain, range);
  const x = makeScale(options.xLog, options.xDomain, [plot.left, plot.right]);
  const y = makeScale(options.yLog, options.yDomain, [plot.bottom, plot.top]);

  const items: SceneItem[] = [];
  const axisStroke: Stroke = { color: AXIS_COLOR, width: 1 };
  items.push(
    { kind: "segment", x1: plot.left, y1: plot.bottom, x2: plot.right, y2: plot.bottom, stroke: axisStroke },
    { kind: "segment", x1: plot.left, y1: plot.bottom, x2: plot.left, y2: plot.top, stroke: axisStroke },
  );
  for (const tick of x.ticks()) {
    const px = x.toPixel(tick);
    items.push({ kind: "segment", x1: px, y1: plot.bottom, x2: px, y2: plot.bottom + 4, stroke: axisStroke });
    items.push({
      kind: "text", x: px, y: plot.bottom + 16, text: x.format(tick),
      size: FONT_SIZE, anchor: "middle", color: AXIS_COLOR,
    });
  }
  for (const tick of y.ticks()) {
    const py = y.toPixel(tick);
    items.push({ kind: "segment", x1: plot.left - 4, y1: py, x2: plot.left, y2: py, stroke: axisStroke });
    items.push({
      kind: "text", x: plot.left - 7, y: py + 4, text: y.format(tick),
      size: FONT_SIZE, anchor: "end", color: AXIS_COLOR,
    });
  }
  items.push({
    kind: "text", x: (plot.left + plot.right) / 2, y: height - 12, text: options.xLabel,
    size: FONT_SIZE, anchor: "middle", color: AXIS_COLOR,
  });
  items.push({
    kind: "text", x: 16, y: (plot.top + plot.bottom) / 2, text: options.yLabel,
    size: FONT_SIZE, anchor: "middle", color: AXIS_COLOR, rotate: -90,
  });
  if (options.title) {
    items.push({
      kind: "text", x: (plot.left + plot.right) / 2, y: 20, text: options.title,
      size: FONT_SIZE + 2, anchor: "middle", color: AXIS_COLOR,
    });
  }

  return { scene: { width, height, background: "#ffffff", items }, x, y, plot };
}

/** Pad a positive range multiplicatively (for log axes). */
export function padLogDomain(lo: number, hi: number, factor = 1.3): [number, number] {
  return [lo / factor, hi * factor];
}

/** Pad a range additively by a fraction of its span. */
export function padLinearDomain(lo: number, hi: number, fraction = 0.06): [number, number] {
  const span = hi - lo || 1;
  return [lo - fraction * span, hi + fraction * span];
}
