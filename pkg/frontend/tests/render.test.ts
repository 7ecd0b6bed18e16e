import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { inflateSync } from "node:zlib";

import { afterAll, describe, expect, it } from "vitest";

import { readCsvFile } from "../src/csv.js";
import { run } from "../src/cli.js";
import { buildFig2 } from "../src/fig2.js";
import { encodePng, renderPng } from "../src/png.js";
import { linearScale, logScale } from "../src/scene.js";

const FIXTURES = join(__dirname, "fixtures");
const tmp = mkdtempSync(join(tmpdir(), "cavityqnd-plots-"));

afterAll(() => rmSync(tmp, { recursive: true, force: true }));

describe("scales", () => {
  it("log scale produces decade ticks with exponent labels", () => {
    const scale = logScale([1e2, 1e5], [0, 300]);
    expect(scale.ticks()).toEqual([1e2, 1e3, 1e4, 1e5]);
    expect(scale.format(1e3)).toBe("1e3");
    expect(scale.toPixel(1e2)).toBeCloseTo(0);
    expect(scale.toPixel(1e5)).toBeCloseTo(300);
    expect(scale.toPixel(1e3)).toBeCloseTo(100);
  });

  it("linear scale covers the domain with nice steps", () => {
    const scale = linearScale([0, 1], [100, 0]);
    const ticks = scale.ticks();
    expect(ticks[0]).toBe(0);
    expect(ticks[ticks.length - 1]).toBeCloseTo(1);
    expect(scale.toPixel(0.5)).toBeCloseTo(50);
    expect(() => linearScale([1, 1], [0, 1])).toThrow(/degenerate/);
    expect(() => logScale([0, 1], [0, 1])).toThrow(/log scale/);
  });
});

describe("raster backend", () => {
  it("writes a structurally valid RGBA PNG of the scene size", () => {
    const { scene } = buildFig2(readCsvFile(join(FIXTURES, "curve.csv")));
    const png = renderPng(scene);
    expect([...png.subarray(0, 8)]).toEqual([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);
    expect(png.subarray(12, 16).toString("ascii")).toBe("IHDR");
    expect(png.readUInt32BE(16)).toBe(scene.width);
    expect(png.readUInt32BE(20)).toBe(scene.height);
    expect(png.readUInt8(24)).toBe(8); // bit depth
    expect(png.readUInt8(25)).toBe(6); // RGBA
  });

  it("round-trips pixel data through the IDAT stream", () => {
    const rgba = new Uint8Array(2 * 2 * 4);
    rgba.set([255, 0, 0, 255, 0, 255, 0, 255, 0, 0, 255, 255, 9, 9, 9, 255]);
    const png = encodePng(2, 2, rgba);
    const idatStart = png.indexOf(Buffer.from("IDAT"), 8) + 4;
    const idatLength = png.readUInt32BE(idatStart - 8);
    const raw = inflateSync(png.subarray(idatStart, idatStart + idatLength));
    // two scanlines, each: filter byte 0 + 8 RGBA bytes
    expect(raw.length).toBe(2 * (1 + 8));
    expect(raw[0]).toBe(0);
    expect([...raw.subarray(1, 9)]).toEqual([255, 0, 0, 255, 0, 255, 0, 255]);
  });

  it("is deterministic", () => {
    const { scene } = buildFig2(readCsvFile(join(FIXTURES, "curve.csv")));
    expect(renderPng(scene).equals(renderPng(scene))).toBe(true);
  });
});

describe("command line", () => {
  it("renders both formats and returns 0", () => {
    const svgOut = join(tmp, "fig2.svg");
    const pngOut = join(tmp, "fig2.png");
    expect(run(["fig2", join(FIXTURES, "curve.csv"), svgOut])).toBe(0);
    expect(run(["fig2", join(FIXTURES, "curve.csv"), pngOut])).toBe(0);
    expect(readFileSync(svgOut, "utf8")).toContain("<svg");
    expect(readFileSync(pngOut).subarray(1, 4).toString("ascii")).toBe("PNG");
    expect(
      run(["overlay", join(FIXTURES, "hist.csv"), join(FIXTURES, "density.csv"), join(tmp, "ov.svg")]),
    ).toBe(0);
  });

  it("signals usage and input errors", () => {
    expect(run(["fig2"])).toBe(2);
    expect(run(["bogus"])).toBe(2);
    expect(run(["fig2", join(FIXTURES, "hist.csv"), join(tmp, "x.svg")])).toBe(1);
    expect(run(["fig2", join(FIXTURES, "curve.csv"), join(tmp, "x.gif")])).toBe(1);
    expect(run(["overlay", join(FIXTURES, "hist.csv"), join(FIXTURES, "curve.csv"), join(tmp, "x.svg")])).toBe(1);
  });
});
