import { readFileSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { columnIndex, numericColumn, parseCsv, readCsvFile, requireSection } from "../src/csv.js";

const FIXTURES = join(__dirname, "fixtures");

describe("sectioned CSV parsing", () => {
  it("reads the reference curve file", () => {
    const file = readCsvFile(join(FIXTURES, "curve.csv"));
    expect(file.metadata.get("schema")).toBe("1");
    expect(file.metadata.get("version")).toBeDefined();
    const section = requireSection(file, "default");
    expect(section.columns).toEqual([
      "cooperativity",
      "target_ps",
      "mode",
      "theta_opt",
      "x_a",
      "x_b",
      "error",
      "converged",
    ]);
    expect(section.rows.length).toBe(13 * 4);
    const errors = numericColumn(section, "error");
    expect(Math.min(...errors)).toBeGreaterThan(0);
  });

  it("splits histogram files into stats and histogram sections", () => {
    const file = readCsvFile(join(FIXTURES, "hist.csv"));
    expect([...file.sections.keys()]).toEqual(["default", "histogram"]);
    expect(requireSection(file, "histogram").rows.length).toBe(200);
  });

  it("rejects files without a schema header", () => {
    expect(() => parseCsv("a,b\n1,2\n")).toThrow(/schema/);
  });

  it("rejects unknown schema versions", () => {
    expect(() => parseCsv("# schema=99\na,b\n1,2\n")).toThrow(/unsupported schema/);
  });

  it("rejects missing sections and columns", () => {
    const file = parseCsv("# schema=1\na,b\n1,2\n");
    expect(() => requireSection(file, "histogram")).toThrow(/section 'histogram' missing/);
    const section = requireSection(file, "default");
    expect(() => columnIndex(section, "missing")).toThrow(/required column/);
  });

  it("rejects non-numeric data in numeric columns", () => {
    const file = parseCsv("# schema=1\na,b\n1,oops\n");
    expect(() => numericColumn(requireSection(file, "default"), "b")).toThrow(/not a finite number/);
  });

  it("round-trips the raw fixture bytes", () => {
    const text = readFileSync(join(FIXTURES, "curve.csv"), "utf8");
    const file = parseCsv(text);
    const section = requireSection(file, "default");
    const dataLines = text.split("\n").filter((l) => l.length > 0 && !l.startsWith("#"));
    expect(dataLines.length).toBe(section.rows.length + 1);
  });
});
