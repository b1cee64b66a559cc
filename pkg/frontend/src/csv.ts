/**
 * Strict reader for the runner's CSV tables.
 *
 * The format is deliberately narrow: one header line, comma separators, no
 * quoting, floats with up to 17 significant digits, and the literal cells
 * nan / inf / -inf for non-finite values.  Anything outside that contract
 * is an error, not a guess.
 */

export interface Table {
  header: string[];
  /** Numeric view of every cell; nan/inf cells become NaN/Infinity. */
  rows: number[][];
}

export class CsvError extends Error {}

const SPECIAL: Record<string, number> = {
  nan: Number.NaN,
  inf: Number.POSITIVE_INFINITY,
  "+inf": Number.POSITIVE_INFINITY,
  "-inf": Number.NEGATIVE_INFINITY,
};

const FLOAT_RE = /^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$/;

export function parseCell(cell: string, line: number, column: string): number {
  if (cell in SPECIAL) return SPECIAL[cell];
  if (!FLOAT_RE.test(cell)) {
    throw new CsvError(
      `line ${line}: cell '${cell}' in column '${column}' is not a float (nor nan/inf/-inf)`,
    );
  }
  return Number(cell);
}

export function parseCsv(text: string): Table {
  const lines = text.split("\n");
  // the runner terminates files with a newline; tolerate its absence
  if (lines.length > 0 && lines[lines.length - 1] === "") lines.pop();
  if (lines.length < 2) {
    throw new CsvError("need a header line and at least one data row");
  }
  const header = lines[0].split(",").map((h) => h.trim());
  if (header.some((h) => h === "")) {
    throw new CsvError("header contains an empty column name");
  }
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new CsvError(
        `line ${i + 1}: expected ${header.length} cells, found ${cells.length}`,
      );
    }
    rows.push(cells.map((c, j) => parseCell(c.trim(), i + 1, header[j])));
  }
  return { header, rows };
}

export function column(table: Table, name: string): number[] {
  const j = table.header.indexOf(name);
  if (j < 0) throw new CsvError(`no column named '${name}'`);
  return table.rows.map((r) => r[j]);
}
