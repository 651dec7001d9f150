/** Grid state: table data plus formatting layers.
 *
 * Two layers sit on top of the immutable cell values: example marks the
 * user painted (these drive learning and render with a border) and
 * rule-applied fills (what an accepted suggestion painted). A cell's
 * displayed format is its example mark if present, else its fill.
 * Applying a rule replaces the column's fills but never touches example
 * marks; every mutation that supports undo snapshots the whole state
 * first, so undo restores it exactly.
 */

import type { ExampleMark, Suggestion } from "./api.js";
import type { TableData } from "./csv.js";

export type FormatId = string;

export interface GridState {
  table: TableData;
  /** "row:col" -> format painted by the user as an example. */
  examples: Record<string, FormatId>;
  /** "row:col" -> format painted by an applied rule. */
  fills: Record<string, FormatId>;
  /** Latest suggestions per column index. */
  suggestions: Record<number, Suggestion[]>;
  /** Column -> example signature at the moment its hand-raise card was
   * dismissed; the card stays hidden until the signature changes. */
  dismissed: Record<number, string>;
}

export function cellKey(row: number, col: number): string {
  return `${row}:${col}`;
}

function emptyState(table: TableData): GridState {
  return { table, examples: {}, fills: {}, suggestions: {}, dismissed: {} };
}

function clone(state: GridState): GridState {
  return structuredClone(state);
}

export class GridStore {
  private state: GridState;
  private undoStack: GridState[] = [];

  constructor(table: TableData = { columns: [], rows: [] }) {
    this.state = emptyState(table);
  }

  get current(): GridState {
    return this.state;
  }

  /** Replace the table, dropping all formatting and history. */
  loadTable(table: TableData): void {
    this.state = emptyState(table);
    this.undoStack = [];
  }

  cellValue(row: number, col: number): string {
    return this.state.table.rows[row]?.[col] ?? "";
  }

  /** The format a cell displays: example mark first, then rule fill. */
  formatOf(row: number, col: number): FormatId | undefined {
    const key = cellKey(row, col);
    return this.state.examples[key] ?? this.state.fills[key];
  }

  isExample(row: number, col: number): boolean {
    return cellKey(row, col) in this.state.examples;
  }

  isRuleFill(row: number, col: number): boolean {
    const key = cellKey(row, col);
    return !(key in this.state.examples) && key in this.state.fills;
  }

  /** Paint an example mark. Reuses the palette format on the cell. */
  formatCell(row: number, col: number, format: FormatId): void {
    this.assertCell(row, col);
    this.state.examples[cellKey(row, col)] = format;
  }

  /** Remove the example mark from a cell (rule fills are untouched). */
  unformatCell(row: number, col: number): void {
    this.assertCell(row, col);
    delete this.state.examples[cellKey(row, col)];
  }

  examplesFor(col: number): ExampleMark[] {
    const marks: ExampleMark[] = [];
    for (const [key, format] of Object.entries(this.state.examples)) {
      const [row, c] = key.split(":").map(Number) as [number, number];
      if (c === col) marks.push({ row, format });
    }
    marks.sort((a, b) => a.row - b.row);
    return marks;
  }

  exampleCount(col: number): number {
    return this.examplesFor(col).length;
  }

  /** Canonical string identifying the column's current example set. */
  exampleSignature(col: number): string {
    return this.examplesFor(col)
      .map((m) => `${m.row}=${m.format}`)
      .join(",");
  }

  setSuggestions(col: number, suggestions: Suggestion[]): void {
    this.state.suggestions[col] = suggestions;
  }

  suggestionsFor(col: number): Suggestion[] {
    return this.state.suggestions[col] ?? [];
  }

  /** Apply a suggestion's mask to a column: the column's rule fills
   * become exactly the mask rows. Example marks are never deleted, and
   * cell values are never touched. Undoable. */
  applySuggestion(col: number, suggestion: Suggestion): void {
    this.pushUndo();
    for (const key of Object.keys(this.state.fills)) {
      if (Number(key.split(":")[1]) === col) delete this.state.fills[key];
    }
    suggestion.mask.forEach((on, row) => {
      if (on) this.state.fills[cellKey(row, col)] = suggestion.rule.format;
    });
  }

  /** Hand-raise is due when the column has reached the threshold and
   * its example set changed since the last dismissal (if any). */
  shouldHandRaise(col: number, threshold: number): boolean {
    if (this.exampleCount(col) < threshold) return false;
    return this.state.dismissed[col] !== this.exampleSignature(col);
  }

  dismissHandRaise(col: number): void {
    this.state.dismissed[col] = this.exampleSignature(col);
  }

  get canUndo(): boolean {
    return this.undoStack.length > 0;
  }

  /** Restore the exact state before the last undoable operation. */
  undo(): boolean {
    const prior = this.undoStack.pop();
    if (!prior) return false;
    this.state = prior;
    return true;
  }

  private pushUndo(): void {
    this.undoStack.push(clone(this.state));
  }

  private assertCell(row: number, col: number): void {
    if (
      row < 0 ||
      row >= this.state.table.rows.length ||
      col < 0 ||
      col >= this.state.table.columns.length
    ) {
      throw new RangeError(`no cell at row ${row}, column ${col}`);
    }
  }
}
