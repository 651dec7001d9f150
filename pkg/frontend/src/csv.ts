/** CSV import/export for the grid.
 *
 * The service consumes raw CSV text, so the grid keeps cell values as
 * strings and regenerates CSV from them; values are never mutated by
 * formatting.
 */

import Papa from "papaparse";

export interface TableData {
  columns: string[];
  rows: string[][];
}

export class CsvError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "CsvError";
  }
}

/** Parse CSV text with a header row into a rectangular table. */
export function parseCsv(text: string): TableData {
  const result = Papa.parse<string[]>(text.replace(/\r\n/g, "\n").trim(), {
    delimiter: ",",
    skipEmptyLines: true,
  });
  if (result.errors.length > 0) {
    const first = result.errors[0]!;
    throw new CsvError(`row ${first.row}: ${first.message}`);
  }
  const grid = result.data;
  if (grid.length < 2) {
    throw new CsvError("need a header row and at least one data row");
  }
  const columns = grid[0]!;
  const width = columns.length;
  const rows = grid.slice(1).map((row) => {
    const padded = row.slice(0, width);
    while (padded.length < width) padded.push("");
    return padded;
  });
  return { columns, rows };
}

/** Serialize the table back to the CSV text the service expects. */
export function toCsv(table: TableData): string {
  return (
    Papa.unparse(
      { fields: table.columns, data: table.rows },
      { newline: "\n" },
    ) + "\n"
  );
}
