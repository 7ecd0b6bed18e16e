/**
 * Reader for the sectioned CSV files the cavityqnd CLI writes.
 *
 * Layout: `#`-prefixed header comments (schema/version/config metadata),
 * then one or more sections.  A section starts at `# section=NAME` (the
 * first, unnamed section is called "default"), its first data line holds the
 * column names and the rest are rows.  These scripts are read-only
 * consumers: they never recompute any physics, only render file contents.
 */
import { readFileSync } from "node:fs";

export const SUPPORTED_SCHEMA = 1;

export interface Section {
  columns: string[];
  rows: string[][];
}

export interface CsvFile {
  /** `# key=value` header entries (schema, tool, version, fit_A, ...). */
  metadata: Map<string, string>;
  /** Raw comment lines, in order. */
  comments: string[];
  sections: Map<string, Section>;
}

export function parseCsv(text: string): CsvFile {
  const metadata = new Map<string, string>();
  const comments: string[] = [];
  const sections = new Map<string, Section>();
  let current: Section | null = null;
  let currentName = "default";

  for (const rawLine of text.split("\n")) {
    const line = rawLine.trimEnd();
    if (line.length === 0) continue;
    if (line.startsWith("#")) {
      comments.push(line);
      const body = line.replace(/^#\s*/, "");
      const eq = body.indexOf("=");
      if (eq > 0 && !body.includes(" ")) {
        metadata.set(body.slice(0, eq), body.slice(eq + 1));
      }
      if (body.startsWith("section=")) {
        currentName = body.slice("section=".length);
        current = null;
      }
      continue;
    }
    if (current === null) {
      current = { columns: line.split(","), rows: [] };
      sections.set(currentName, current);
    } else {
      current.rows.push(line.split(","));
    }
  }

  const schema = metadata.get("schema");
  if (schema === undefined) {
    throw new Error("not a cavityqnd CSV: missing '# schema=' header");
  }
  if (Number(schema) !== SUPPORTED_SCHEMA) {
    throw new Error(`unsupported schema version ${schema} (expected ${SUPPORTED_SCHEMA})`);
  }
  return { metadata, comments, sections };
}

export function readCsvFile(path: string): CsvFile {
  return parseCsv(readFileSync(path, "utf8"));
}

/** Column accessor that fails loudly when a required column is absent. */
export function columnIndex(section: Section, name: string): number {
  const index = section.columns.indexOf(name);
  if (index < 0) {
    throw new Error(`required column '${name}' missing (have: ${section.columns.join(", ")})`);
  }
  return index;
}

export function numericColumn(section: Section, name: string): number[] {
  const index = columnIndex(section, name);
  return section.rows.map((row, i) => {
    const value = Number(row[index]);
    if (!Number.isFinite(value)) {
      throw new Error(`row ${i + 1}: column '${name}' is not a finite number: ${row[index]}`);
    }
    return value;
  });
}

export function stringColumn(section: Section, name: string): string[] {
  const index = columnIndex(section, name);
  return section.rows.map((row) => row[index] ?? "");
}

export function requireSection(file: CsvFile, name: string): Section {
  const section = file.sections.get(name);
  if (!section) {
    throw new Error(`section '${name}' missing (have: ${[...file.sections.keys()].join(", ") || "none"})`);
  }
  if (section.rows.length === 0) {
    throw new Error(`section '${name}' has no data rows`);
  }
  return section;
}
