/**
 * Editor state: the loaded workspace, the working annotation set, the
 * suggestion triage queue, and the migration conflicts panel.
 *
 * The working set lives client side until save(). A failed PUT keeps the
 * working set untouched so nothing the user entered is lost; the last
 * successfully saved set stays authoritative for what the server holds.
 */

import type { ApiClient, PutOutcome } from "./client.js";
import { canonicalBytes, codePointCompare } from "./canonical.js";
import { groupClaims, validateSet } from "./forms.js";
import type { ModelIndex, TreeViewState } from "./tree.js";
import { applyFilters, buildIndex, createViewState } from "./tree.js";
import type {
  AnnotationJson,
  AnnotationKind,
  AnnotationSetJson,
  ClassificationJson,
  DiagnosticJson,
  MigrationJson,
  UsagesJson,
  ValidationResultJson,
} from "./types.js";

export interface Workspace {
  index: ModelIndex;
  usages: UsagesJson;
  classification: ClassificationJson;
}

export type TriageDecision = "accepted" | "rejected" | "skipped";

export interface SuggestionItem {
  annotation: AnnotationJson;
  decision: TriageDecision | null;
}

function sortAnnotations(annotations: readonly AnnotationJson[]): AnnotationJson[] {
  return [...annotations].sort(
    (a, b) => codePointCompare(a.target, b.target) || codePointCompare(a.kind, b.kind),
  );
}

function sameSlot(a: AnnotationJson, b: AnnotationJson): boolean {
  return a.target === b.target && (a.kind === "move") === (b.kind === "move");
}

export class EditorStore {
  workspace: Workspace | null = null;
  view: TreeViewState = createViewState();
  /** Last load error; a previously loaded workspace stays usable read-only. */
  loadError: string | null = null;

  /** Server-held set as of the last successful load or save. */
  savedAnnotations: AnnotationJson[] = [];
  /** Local working copy; diverges from savedAnnotations until save(). */
  working: AnnotationJson[] = [];

  suggestions: SuggestionItem[] = [];
  private triageCursor = 0;

  migration: MigrationJson | null = null;

  constructor(private readonly client: ApiClient) {}

  // ----- loading -------------------------------------------------------------

  async load(): Promise<void> {
    try {
      const [model, usages, classification, saved, suggested] = await Promise.all([
        this.client.model(),
        this.client.usages(),
        this.client.classification(),
        this.client.annotations(),
        this.client.suggest(),
      ]);
      this.workspace = {
        index: buildIndex(model, classification, usages),
        usages,
        classification,
      };
      this.savedAnnotations = saved.annotations;
      this.working = [...saved.annotations];
      const pending = suggested.annotations.filter(
        (s) => !this.working.some((a) => sameSlot(a, s)),
      );
      this.suggestions = pending.map((annotation) => ({ annotation, decision: null }));
      this.triageCursor = 0;
      this.loadError = null;
    } catch (error) {
      this.loadError = error instanceof Error ? error.message : String(error);
      throw error;
    }
  }

  get isLoaded(): boolean {
    return this.workspace !== null;
  }

  private get index(): ModelIndex {
    if (this.workspace === null) {
      throw new Error("workspace is not loaded");
    }
    return this.workspace.index;
  }

  // ----- tree ----------------------------------------------------------------

  annotatedTargets(): Set<string> {
    return new Set(this.working.map((a) => a.target));
  }

  /** Visible targets under the current filters; enforces the selection rule. */
  visible(): string[] {
    return applyFilters(this.view, this.index, this.annotatedTargets());
  }

  // ----- working set ---------------------------------------------------------

  annotationsFor(target: string): AnnotationJson[] {
    return this.working.filter((a) => a.target === target);
  }

  /**
   * Validate the draft against the working set and add it when clean.
   * Returns the diagnostics either way; errors mean nothing was added.
   */
  addAnnotation(draft: AnnotationJson): ValidationResultJson {
    const candidate = [...this.working, draft];
    const result = validateSet(this.index, candidate);
    if (result.errors.length === 0) {
      this.working = candidate;
    }
    return result;
  }

  removeAnnotation(target: string, kind: AnnotationKind): boolean {
    const before = this.working.length;
    this.working = this.working.filter((a) => !(a.target === target && a.kind === kind));
    return this.working.length < before;
  }

  /** Parameter targets the working set's groups claim. */
  claimedTargets(): Map<string, string> {
    return groupClaims(this.working);
  }

  // ----- suggestion triage -----------------------------------------------------

  get pendingSuggestions(): SuggestionItem[] {
    return this.suggestions.filter((s) => s.decision === null);
  }

  /** The suggestion under the triage cursor, if any remain. */
  currentSuggestion(): SuggestionItem | null {
    const pending = this.pendingSuggestions;
    if (pending.length === 0) return null;
    return pending[this.triageCursor % pending.length] ?? null;
  }

  /**
   * Accept the current suggestion: its origin flips to manual (manual wins
   * over auto on merge) and it joins the working set.
   */
  acceptCurrent(): ValidationResultJson | null {
    const item = this.currentSuggestion();
    if (item === null) return null;
    const accepted: AnnotationJson = { ...item.annotation, origin: "manual" };
    const result = this.addAnnotation(accepted);
    if (result.errors.length === 0) {
      item.decision = "accepted";
      this.clampCursor();
    }
    return result;
  }

  rejectCurrent(): void {
    const item = this.currentSuggestion();
    if (item !== null) {
      item.decision = "rejected";
      this.clampCursor();
    }
  }

  skipCurrent(): void {
    const pending = this.pendingSuggestions;
    if (pending.length > 0) {
      this.triageCursor = (this.triageCursor + 1) % pending.length;
    }
  }

  private clampCursor(): void {
    const pending = this.pendingSuggestions.length;
    if (pending === 0) {
      this.triageCursor = 0;
    } else {
      this.triageCursor = this.triageCursor % pending;
    }
  }

  // ----- export and save -------------------------------------------------------

  /** The working set in the wire shape, sorted the way the server sorts. */
  buildSet(): AnnotationSetJson {
    return {
      schema: "annotations/1",
      library: { ...this.index.library },
      annotations: sortAnnotations(this.working),
    };
  }

  /** Bytes the export button writes; identical to GET /v1/annotations after save. */
  exportBytes(): Uint8Array {
    return canonicalBytes(this.buildSet());
  }

  validateWorking(): ValidationResultJson {
    return validateSet(this.index, this.working);
  }

  /**
   * PUT the working set. On success the saved set catches up; on a 422 the
   * working set is untouched and the diagnostics come back for the forms.
   */
  async save(): Promise<PutOutcome> {
    const set = this.buildSet();
    const outcome = await this.client.putAnnotations(set);
    if (outcome.ok) {
      this.savedAnnotations = set.annotations;
      this.working = [...set.annotations];
    }
    return outcome;
  }

  get dirty(): boolean {
    const a = sortAnnotations(this.working);
    const b = sortAnnotations(this.savedAnnotations);
    return (
      a.length !== b.length ||
      a.some((x, i) => JSON.stringify(x) !== JSON.stringify(b[i]))
    );
  }

  // ----- migration conflicts -----------------------------------------------------

  loadMigration(doc: MigrationJson): void {
    this.migration = doc;
  }

  migrationConflicts(): { dropped: DiagnosticJson[]; needsReview: DiagnosticJson[] } {
    const conflicts = this.migration?.migration?.conflicts;
    if (conflicts === undefined || conflicts === null) {
      return { dropped: [], needsReview: [] };
    }
    return {
      dropped: conflicts.dropped.map((row) => ({
        severity: "error" as const,
        target: row.target,
        message: row.reason,
      })),
      needsReview: conflicts.needs_review.map((row) => ({
        severity: "warning" as const,
        target: row.target,
        message: row.reason,
      })),
    };
  }
}
