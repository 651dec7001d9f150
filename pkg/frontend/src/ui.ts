/** DOM layer: grid rendering, formatting palette, suggestion sidebar,
 * and the hand-raise card.
 *
 * Cells the user painted as examples render with a thick border on top
 * of their fill; rule-applied cells render fill-only, so it is always
 * visible which cells drive learning. All learning goes through the
 * service client — this file contains no rule logic.
 */

import { ApiClient, ApiError, Suggestion } from "./api.js";
import { parseCsv, toCsv, CsvError, TableData } from "./csv.js";
import { GridStore } from "./state.js";

export const PALETTE: Record<string, string> = {
  yellow: "#f5d76e",
  green: "#8fd694",
  red: "#f1948a",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class GridApp {
  readonly store = new GridStore();
  private selectedCol = 0;
  private activeFormat = "yellow";
  private handRaiseThreshold = 3;
  private handRaiseCol: number | null = null;

  private grid!: HTMLElement;
  private sidebar!: HTMLElement;
  private handRaise!: HTMLElement;
  private toast!: HTMLElement;
  private detectButton!: HTMLButtonElement;
  private undoButton!: HTMLButtonElement;
  private statusBadge!: HTMLElement;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
  ) {}

  async start(): Promise<void> {
    this.buildChrome();
    try {
      await this.api.health();
      const config = await this.api.config();
      this.handRaiseThreshold = config.handraise_threshold;
      this.statusBadge.textContent = "service: ok";
      this.statusBadge.classList.add("ok");
    } catch {
      this.statusBadge.textContent = "service: unreachable";
      this.showToast("service unreachable — load it with `cfsynth serve`", true);
    }
    this.render();
  }

  loadCsvText(text: string): void {
    let table: TableData;
    try {
      table = parseCsv(text);
    } catch (err) {
      this.showToast(
        err instanceof CsvError ? `CSV error: ${err.message}` : String(err),
        true,
      );
      return;
    }
    this.store.loadTable(table);
    this.selectedCol = 0;
    this.hideHandRaise();
    this.render();
  }

  /** Learn rules for the selected column and list them in the sidebar. */
  async detectFormatting(): Promise<void> {
    const col = this.selectedCol;
    const marks = this.store.examplesFor(col);
    if (marks.length === 0) return;
    try {
      const resp = await this.api.suggest(
        toCsv(this.store.current.table),
        col,
        marks,
      );
      const format = marks[0]!.format;
      this.store.setSuggestions(col, resp.suggestions[format] ?? []);
      this.render();
    } catch (err) {
      this.reportLearnError(err);
    }
  }

  /** Ctrl+Shift+O: learn and immediately apply the top-ranked rule. */
  async learnAndApply(): Promise<void> {
    const col = this.selectedCol;
    const marks = this.store.examplesFor(col);
    if (marks.length === 0) {
      this.showToast("format an example cell first", false);
      return;
    }
    try {
      const resp = await this.api.suggest(
        toCsv(this.store.current.table),
        col,
        marks,
      );
      const format = marks[0]!.format;
      const top = (resp.suggestions[format] ?? [])[0];
      if (!top) {
        this.showToast("no rule found — add more examples", false);
        return;
      }
      this.store.setSuggestions(col, resp.suggestions[format] ?? []);
      this.applySuggestion(col, top);
    } catch (err) {
      this.reportLearnError(err);
    }
  }

  applySuggestion(col: number, suggestion: Suggestion): void {
    this.store.applySuggestion(col, suggestion);
    this.render();
  }

  undo(): void {
    if (this.store.undo()) this.render();
  }

  // -- internals ---------------------------------------------------------

  private buildChrome(): void {
    this.root.innerHTML = "";
    const toolbar = el("div", "toolbar");

    const fileInput = el("input") as HTMLInputElement;
    fileInput.type = "file";
    fileInput.accept = ".csv,text/csv";
    fileInput.dataset.testid = "file-input";
    fileInput.addEventListener("change", () => {
      const file = fileInput.files?.[0];
      if (!file) return;
      void file.text().then((text) => this.loadCsvText(text));
    });
    toolbar.append(fileInput);

    const pasteBox = el("textarea", "paste-box") as HTMLTextAreaElement;
    pasteBox.placeholder = "…or paste CSV here";
    pasteBox.dataset.testid = "paste-box";
    const pasteButton = el("button", "", "Load pasted CSV");
    pasteButton.dataset.testid = "paste-load";
    pasteButton.addEventListener("click", () => {
      if (pasteBox.value.trim()) this.loadCsvText(pasteBox.value);
    });
    toolbar.append(pasteBox, pasteButton);

    const palette = el("select") as HTMLSelectElement;
    palette.dataset.testid = "palette";
    for (const name of Object.keys(PALETTE)) {
      const option = el("option", "", name) as HTMLOptionElement;
      option.value = name;
      palette.append(option);
    }
    palette.addEventListener("change", () => {
      this.activeFormat = palette.value;
    });
    toolbar.append(palette);

    this.detectButton = el("button", "", "Detect Formatting") as HTMLButtonElement;
    this.detectButton.dataset.testid = "detect";
    this.detectButton.addEventListener("click", () => void this.detectFormatting());
    toolbar.append(this.detectButton);

    this.undoButton = el("button", "", "Undo") as HTMLButtonElement;
    this.undoButton.dataset.testid = "undo";
    this.undoButton.addEventListener("click", () => this.undo());
    toolbar.append(this.undoButton);

    this.statusBadge = el("span", "status");
    toolbar.append(this.statusBadge);

    this.grid = el("div", "grid");
    this.sidebar = el("aside", "sidebar");
    this.handRaise = el("div", "hand-raise hidden");
    this.toast = el("div", "toast hidden");

    const main = el("div", "main");
    main.append(this.grid, this.sidebar);
    this.root.append(toolbar, main, this.handRaise, this.toast);

    document.addEventListener("keydown", (event) => {
      if (event.ctrlKey && event.shiftKey && event.key.toLowerCase() === "o") {
        event.preventDefault();
        void this.learnAndApply();
      }
    });
  }

  private render(): void {
    this.renderGrid();
    this.renderSidebar();
    this.detectButton.disabled = this.store.exampleCount(this.selectedCol) === 0;
    this.undoButton.disabled = !this.store.canUndo;
  }

  private renderGrid(): void {
    const { columns, rows } = this.store.current.table;
    this.grid.innerHTML = "";
    if (columns.length === 0) {
      this.grid.append(el("p", "placeholder", "Load a CSV to begin."));
      return;
    }
    const table = el("table");
    const head = el("tr");
    for (const [c, name] of columns.entries()) {
      const th = el("th", c === this.selectedCol ? "selected" : "", name);
      head.append(th);
    }
    table.append(head);
    rows.forEach((row, r) => {
      const tr = el("tr");
      row.forEach((value, c) => {
        const td = el("td", "", value);
        td.dataset.row = String(r);
        td.dataset.col = String(c);
        const format = this.store.formatOf(r, c);
        if (format) {
          td.style.backgroundColor = PALETTE[format] ?? "#ddd";
          td.dataset.format = format;
          td.classList.add(this.store.isExample(r, c) ? "example" : "fill");
        }
        td.addEventListener("click", () => this.onCellClick(r, c));
        tr.append(td);
      });
      table.append(tr);
    });
    this.grid.append(table);
  }

  private renderSidebar(): void {
    this.sidebar.innerHTML = "";
    this.sidebar.append(el("h2", "", "Suggestions"));
    const suggestions = this.store.suggestionsFor(this.selectedCol);
    if (suggestions.length === 0) {
      this.sidebar.append(
        el("p", "placeholder", "Format examples, then Detect Formatting."),
      );
      return;
    }
    suggestions.forEach((s, i) => {
      const card = el("div", "card");
      card.dataset.testid = `suggestion-${i}`;
      const matches = s.mask.filter(Boolean).length;
      card.append(el("code", "formula", s.formula));
      card.append(el("span", "badge", `${matches} matches`));
      const apply = el("button", "", "Apply");
      apply.dataset.testid = `apply-${i}`;
      apply.addEventListener("click", () =>
        this.applySuggestion(this.selectedCol, s),
      );
      card.append(apply);
      this.sidebar.append(card);
    });
  }

  private onCellClick(row: number, col: number): void {
    this.selectedCol = col;
    if (
      this.store.isExample(row, col) &&
      this.store.current.examples[`${row}:${col}`] === this.activeFormat
    ) {
      this.store.unformatCell(row, col);
    } else {
      this.store.formatCell(row, col, this.activeFormat);
    }
    this.render();
    void this.maybeHandRaise(col);
  }

  /** Background watcher: once a column crosses the threshold, quietly
   * learn and offer the top rule in a dismissible card. */
  private async maybeHandRaise(col: number): Promise<void> {
    if (!this.store.shouldHandRaise(col, this.handRaiseThreshold)) {
      if (this.handRaiseCol === col) this.hideHandRaise();
      return;
    }
    const marks = this.store.examplesFor(col);
    let top: Suggestion | undefined;
    try {
      const resp = await this.api.suggest(
        toCsv(this.store.current.table),
        col,
        marks,
      );
      top = (resp.suggestions[marks[0]!.format] ?? [])[0];
    } catch {
      return; // background path: stay silent on errors and aborts
    }
    if (!top) return;
    this.showHandRaise(col, top);
  }

  private showHandRaise(col: number, suggestion: Suggestion): void {
    this.handRaiseCol = col;
    this.handRaise.classList.remove("hidden");
    this.handRaise.innerHTML = "";
    const columnName = this.store.current.table.columns[col] ?? `#${col}`;
    this.handRaise.append(
      el("p", "", `Format "${columnName}" like this?`),
      el("code", "formula", suggestion.formula),
    );
    const accept = el("button", "", "Accept");
    accept.dataset.testid = "handraise-accept";
    accept.addEventListener("click", () => {
      this.applySuggestion(col, suggestion);
      this.hideHandRaise();
    });
    const dismiss = el("button", "", "Dismiss");
    dismiss.dataset.testid = "handraise-dismiss";
    dismiss.addEventListener("click", () => {
      this.store.dismissHandRaise(col);
      this.hideHandRaise();
    });
    this.handRaise.append(accept, dismiss);
  }

  private hideHandRaise(): void {
    this.handRaiseCol = null;
    this.handRaise.classList.add("hidden");
    this.handRaise.innerHTML = "";
  }

  private reportLearnError(err: unknown): void {
    if (err instanceof DOMException && err.name === "AbortError") return;
    if (err instanceof ApiError && err.needsMoreExamples) {
      this.showToast("no rule yet — add more examples", false);
    } else if (err instanceof ApiError) {
      this.showToast(`${err.code}: ${err.message}`, true);
    } else {
      this.showToast("service unreachable", true);
    }
  }

  private showToast(message: string, isError: boolean): void {
    this.toast.textContent = message;
    this.toast.classList.toggle("error", isError);
    this.toast.classList.remove("hidden");
    setTimeout(() => this.toast.classList.add("hidden"), 4000);
  }
}
