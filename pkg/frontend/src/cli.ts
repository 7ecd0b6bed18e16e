#!/usr/bin/env node
/**
 * Batch renderer for cavityqnd CSV outputs.
 *
 *   cavityqnd-plots fig2 <curve.csv> <out.svg|out.png>
 *   cavityqnd-plots overlay <hist.csv> <density.csv> <out.svg|out.png>
 *
 * Output format follows the file extension; exit codes: 0 ok, 1 input or
 * rendering error, 2 usage error.
 */
import { writeFileSync } from "node:fs";

import { readCsvFile } from "./csv.js";
import { buildFig2 } from "./fig2.js";
import { buildOverlay } from "./overlay.js";
import { renderPng } from "./png.js";
import type { Scene } from "./scene.js";
import { renderSvg } from "./svg.js";

function writeScene(scene: Scene, outPath: string): void {
  if (outPath.endsWith(".svg")) {
    writeFileSync(outPath, renderSvg(scene));
  } else if (outPath.endsWith(".png")) {
    writeFileSync(outPath, renderPng(scene));
  } else {
    throw new Error(`unsupported output format for ${outPath} (use .svg or .png)`);
  }
}

export function run(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    if (command === "fig2") {
      if (rest.length !== 2) {
        console.error("usage: cavityqnd-plots fig2 <curve.csv> <out.svg|out.png>");
        return 2;
      }
      const [input, output] = rest as [string, string];
      const result = buildFig2(readCsvFile(input));
      for (const warning of result.warnings) console.error(`warning: ${warning}`);
      writeScene(result.scene, output);
      console.error(`fig2: ${result.series.length} series -> ${output}`);
      return 0;
    }
    if (command === "overlay") {
      if (rest.length !== 3) {
        console.error("usage: cavityqnd-plots overlay <hist.csv> <density.csv> <out.svg|out.png>");
        return 2;
      }
      const [histPath, densityPath, output] = rest as [string, string, string];
      const result = buildOverlay(readCsvFile(histPath), readCsvFile(densityPath));
      writeScene(result.scene, output);
      console.error(
        `overlay: ${result.bins} bins, ${result.outliers} outliers ` +
          `(${(100 * result.outlierFraction).toFixed(2)}%) -> ${output}`,
      );
      return 0;
    }
    console.error("usage: cavityqnd-plots <fig2|overlay> ...");
    return 2;
  } catch (error) {
    console.error(`error: ${error instanceof Error ? error.message : error}`);
    return 1;
  }
}

const invokedDirectly = process.argv[1]?.endsWith("cli.js") || process.argv[1]?.endsWith("cavityqnd-plots");
if (invokedDirectly) {
  process.exit(run(process.argv.slice(2)));
}
