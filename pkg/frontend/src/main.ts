/**
 * Browser glue. Everything with behavior lives in the headless modules; this
 * file only wires DOM events to the store and paints the results.
 */

import { ApiClient } from "./client.js";
import {
  kindOptions,
  literalFromInput,
  makeAttribute,
  makeEnum,
  makeGroup,
  makeMove,
  makeRemove,
  parseEnumMembers,
  parseGroupVariants,
  prefillEnum,
} from "./forms.js";
import { renderAnnotation, renderDiagnostics, renderSignature, renderTree } from "./render.js";
import { EditorStore } from "./store.js";
import { select, toggleExpanded } from "./tree.js";
import type { AnnotationKind, MigrationJson, ValidationResultJson } from "./types.js";

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

function clear(node: HTMLElement): void {
  while (node.firstChild !== null) node.removeChild(node.firstChild);
}

function line(parent: HTMLElement, text: string, className = ""): HTMLElement {
  const div = document.createElement("div");
  div.textContent = text;
  if (className !== "") div.className = className;
  parent.appendChild(div);
  return div;
}

export class EditorApp {
  private client: ApiClient | null = null;
  private store: EditorStore | null = null;

  constructor(private readonly fetchImpl: typeof fetch = fetch) {}

  private readonly keyHandler = (e: KeyboardEvent): void => this.triageKeys(e);

  start(): void {
    byId<HTMLButtonElement>("load").addEventListener("click", () => void this.load());
    byId<HTMLButtonElement>("save").addEventListener("click", () => void this.save());
    byId<HTMLButtonElement>("export").addEventListener("click", () => this.exportSet());
    byId<HTMLButtonElement>("generate").addEventListener("click", () => void this.preview());
    byId<HTMLInputElement>("migration-file").addEventListener("change", (e) => {
      void this.readMigration(e);
    });
    for (const id of ["f-publicness", "f-usage", "f-utility", "f-annotated"]) {
      byId<HTMLSelectElement>(id).addEventListener("change", () => this.applyFilterInputs());
    }
    byId<HTMLInputElement>("f-search").addEventListener("input", () => this.applyFilterInputs());
    document.addEventListener("keydown", this.keyHandler);
    byId<HTMLButtonElement>("sg-accept").addEventListener("click", () => this.triage("a"));
    byId<HTMLButtonElement>("sg-reject").addEventListener("click", () => this.triage("r"));
    byId<HTMLButtonElement>("sg-skip").addEventListener("click", () => this.triage("s"));
  }

  /** Detach the document-level listener; element listeners die with the DOM. */
  stop(): void {
    document.removeEventListener("keydown", this.keyHandler);
  }

  private banner(text: string, isError: boolean): void {
    const banner = byId<HTMLDivElement>("banner");
    banner.textContent = text;
    banner.className = isError ? "banner error" : "banner";
  }

  private async load(): Promise<void> {
    const base = byId<HTMLInputElement>("base-url").value.trim() || "http://127.0.0.1:8080";
    this.client = new ApiClient(base, this.fetchImpl);
    const fresh = new EditorStore(this.client);
    try {
      await fresh.load();
      this.store = fresh;
      this.banner(`loaded ${fresh.buildSet().library.name}`, false);
    } catch (error) {
      // Keep any previously loaded workspace usable read-only.
      this.banner(`load failed (${String(error)}); retry when the service is back`, true);
    }
    this.refresh();
  }

  private applyFilterInputs(): void {
    if (this.store === null) return;
    const filters = this.store.view.filters;
    filters.publicness = byId<HTMLSelectElement>("f-publicness").value as never;
    filters.usage = byId<HTMLSelectElement>("f-usage").value as never;
    filters.parameterUtility = byId<HTMLSelectElement>("f-utility").value as never;
    filters.annotated = byId<HTMLSelectElement>("f-annotated").value as never;
    filters.search = byId<HTMLInputElement>("f-search").value;
    this.refresh();
  }

  private refresh(): void {
    const store = this.store;
    if (store === null || !store.isLoaded) return;
    this.paintTree();
    this.paintDetail();
    this.paintSuggestions();
    this.paintConflicts();
    byId<HTMLButtonElement>("save").disabled = !store.dirty;
  }

  private paintTree(): void {
    const store = this.store!;
    const pane = byId<HTMLDivElement>("tree");
    clear(pane);
    const visible = store.visible();
    const index = store.workspace!.index;
    for (const row of renderTree(index, store.view, visible)) {
      const rowEl = line(pane, row.line, "tree-row");
      rowEl.addEventListener("click", () => {
        const node = index.nodes.get(row.target)!;
        if (node.children.length > 0) toggleExpanded(store.view, row.target);
        select(store.view, index, row.target);
        this.refresh();
      });
    }
  }

  private paintDetail(): void {
    const store = this.store!;
    const pane = byId<HTMLDivElement>("detail");
    clear(pane);
    const target = store.view.selection;
    if (target === null) {
      line(pane, "select an element");
      return;
    }
    const node = store.workspace!.index.nodes.get(target)!;
    line(pane, target, "detail-target");
    if (node.callable !== undefined) line(pane, renderSignature(node.callable));
    const doc = node.callable?.docstring ?? node.classInfo?.docstring;
    if (doc !== undefined && doc !== null) line(pane, doc, "docstring");
    for (const a of store.annotationsFor(target)) {
      const row = line(pane, renderAnnotation(a), "annotation-row");
      const remove = document.createElement("button");
      remove.textContent = "x";
      remove.addEventListener("click", () => {
        store.removeAnnotation(a.target, a.kind);
        this.refresh();
      });
      row.appendChild(remove);
    }
    this.paintForms(pane, target);
  }

  private paintForms(pane: HTMLElement, target: string): void {
    const store = this.store!;
    const index = store.workspace!.index;
    for (const option of kindOptions(index, target, store.working)) {
      const box = document.createElement("fieldset");
      const legend = document.createElement("legend");
      legend.textContent = `@${option.kind}`;
      box.appendChild(legend);
      if (!option.enabled) {
        box.disabled = true;
        line(box, option.reason ?? "", "disabled-reason");
        pane.appendChild(box);
        continue;
      }
      const diagBox = document.createElement("div");
      diagBox.className = "diagnostics";
      const submit = (draft: Parameters<EditorStore["addAnnotation"]>[0]) => {
        const result = store.addAnnotation(draft);
        if (result.errors.length > 0) {
          // Leave the form as typed; a repaint would wipe the diagnostics.
          this.showDiagnostics(diagBox, result);
          return;
        }
        if (result.warnings.length > 0) {
          this.banner(renderDiagnostics(result.warnings).join("; "), false);
        }
        this.refresh();
      };
      this.buildForm(box, option.kind, target, submit);
      box.appendChild(diagBox);
      pane.appendChild(box);
    }
  }

  private buildForm(
    box: HTMLFieldSetElement,
    kind: AnnotationKind,
    target: string,
    submit: (draft: ReturnType<typeof makeRemove>) => void,
  ): void {
    const store = this.store!;
    const index = store.workspace!.index;
    const node = index.nodes.get(target)!;
    const input = (placeholder: string): HTMLInputElement => {
      const field = document.createElement("input");
      field.placeholder = placeholder;
      box.appendChild(field);
      return field;
    };
    const textarea = (placeholder: string): HTMLTextAreaElement => {
      const field = document.createElement("textarea");
      field.placeholder = placeholder;
      box.appendChild(field);
      return field;
    };
    const addButton = (label: string, onClick: () => void): void => {
      const button = document.createElement("button");
      button.textContent = label;
      button.addEventListener("click", onClick);
      box.appendChild(button);
    };

    if (kind === "remove") {
      const baked =
        node.kind === "parameter" ? input("baked value (optional, e.g. True or 'gini')") : null;
      addButton("add @remove", () => {
        const text = baked?.value.trim() ?? "";
        submit(text === "" ? makeRemove(target) : makeRemove(target, literalFromInput(text)));
      });
    } else if (kind === "attribute") {
      const override = input("default override (optional)");
      addButton("add @attribute", () => {
        const text = override.value.trim();
        submit(
          text === "" ? makeAttribute(target) : makeAttribute(target, literalFromInput(text)),
        );
      });
    } else if (kind === "enum") {
      const name = input("enum type name");
      const members = textarea("one member per line: NAME = value");
      const prefilled = prefillEnum(index, target);
      if (prefilled !== null) {
        addButton("prefill from observed values", () => {
          name.value = prefilled.enum_name;
          members.value = prefilled.members
            .map((m) => `${m.member_name} = ${m.string_value}`)
            .join("\n");
        });
      }
      addButton("add @enum", () => {
        submit(
          makeEnum(target, {
            enum_name: name.value.trim(),
            members: parseEnumMembers(members.value),
          }),
        );
      });
    } else if (kind === "group") {
      const name = input("group class name");
      const discriminator = input("discriminator parameter");
      const variants = textarea("one variant per line: name = value: member, member");
      addButton("add @group", () => {
        submit(
          makeGroup(target, {
            group_name: name.value.trim(),
            discriminator_param: discriminator.value.trim(),
            variants: parseGroupVariants(variants.value),
          }),
        );
      });
    } else {
      const destination = input(`destination module (under ${index.library.name})`);
      addButton("add @move", () => submit(makeMove(target, destination.value.trim())));
    }
  }

  private showDiagnostics(box: HTMLElement, result: ValidationResultJson): void {
    clear(box);
    for (const text of renderDiagnostics([...result.errors, ...result.warnings])) {
      line(box, text, text.startsWith("error") ? "diag-error" : "diag-warning");
    }
  }

  private paintSuggestions(): void {
    const store = this.store!;
    const pane = byId<HTMLDivElement>("suggestions");
    clear(pane);
    const pending = store.pendingSuggestions.length;
    line(pane, `${pending} suggestions pending (a accept, r reject, s skip)`);
    const current = store.currentSuggestion();
    if (current !== null) {
      line(pane, renderAnnotation(current.annotation), "suggestion-current");
    }
  }

  private triage(key: "a" | "r" | "s"): void {
    const store = this.store;
    if (store === null || !store.isLoaded) return;
    if (key === "a") {
      const result = store.acceptCurrent();
      if (result !== null && result.errors.length > 0) {
        this.banner(renderDiagnostics(result.errors).join("; "), true);
      }
    } else if (key === "r") {
      store.rejectCurrent();
    } else {
      store.skipCurrent();
    }
    this.refresh();
  }

  private triageKeys(event: KeyboardEvent): void {
    const target = event.target as HTMLElement | null;
    const tag = target?.tagName?.toLowerCase() ?? "";
    if (tag === "input" || tag === "textarea" || tag === "select") return;
    if (event.key === "a" || event.key === "r" || event.key === "s") {
      this.triage(event.key);
    }
  }

  private async save(): Promise<void> {
    const store = this.store;
    if (store === null) return;
    const local = store.validateWorking();
    if (local.errors.length > 0) {
      this.banner(renderDiagnostics(local.errors).join("; "), true);
      return;
    }
    try {
      const outcome = await store.save();
      if (outcome.ok) {
        this.banner(`saved ${outcome.accepted} annotations`, false);
      } else {
        // Working set stays as typed; the errors point at the fields.
        this.banner(renderDiagnostics(outcome.errors).join("; "), true);
      }
    } catch (error) {
      this.banner(`save failed: ${String(error)}`, true);
    }
    this.refresh();
  }

  private exportSet(): void {
    const store = this.store;
    if (store === null) return;
    const bytes = store.exportBytes();
    const blob = new Blob([bytes.slice().buffer], { type: "application/json" });
    const anchor = document.createElement("a");
    anchor.href = URL.createObjectURL(blob);
    anchor.download = "annotations.json";
    anchor.click();
    URL.revokeObjectURL(anchor.href);
  }

  private async readMigration(event: Event): Promise<void> {
    const store = this.store;
    const files = (event.target as HTMLInputElement).files;
    if (store === null || files === null || files.length === 0) return;
    const text = await files[0]!.text();
    try {
      store.loadMigration(JSON.parse(text) as MigrationJson);
      this.banner("migration loaded", false);
    } catch {
      this.banner("migration file is not valid JSON", true);
    }
    this.refresh();
  }

  private paintConflicts(): void {
    const store = this.store!;
    const pane = byId<HTMLDivElement>("conflicts");
    clear(pane);
    const { dropped, needsReview } = store.migrationConflicts();
    if (dropped.length === 0 && needsReview.length === 0) {
      line(pane, "no migration loaded");
      return;
    }
    line(pane, `${dropped.length} dropped, ${needsReview.length} need review`);
    for (const text of renderDiagnostics([...dropped, ...needsReview])) {
      line(pane, text);
    }
  }

  private async preview(): Promise<void> {
    if (this.client === null) return;
    try {
      const generated = await this.client.generate();
      const pane = byId<HTMLPreElement>("preview");
      pane.textContent = generated.files
        .map((f) => `# ${f.path}\n${f.content}`)
        .join("\n\n");
    } catch (error) {
      this.banner(`generate failed: ${String(error)}`, true);
    }
  }
}
