/**
 * Pure renderers: view state in, display strings out. The browser glue turns
 * these into DOM nodes; tests assert on them directly.
 */

import type { ModelIndex, TreeNode, TreeViewState } from "./tree.js";
import type {
  AnnotationJson,
  CallableJson,
  DiagnosticJson,
  ParameterJson,
} from "./types.js";

function renderParam(p: ParameterJson): string {
  const prefix = p.kind === "var_positional" ? "*" : p.kind === "var_keyword" ? "**" : "";
  const suffix = p.default === null ? "" : `=${p.default.text}`;
  return prefix + p.name + suffix;
}

export function renderSignature(fn: CallableJson): string {
  const name = fn.qname.split(".").pop() ?? fn.qname;
  return `${name}(${fn.parameters.map(renderParam).join(", ")})`;
}

export function renderBadge(node: TreeNode): string {
  return node.badge === null ? "" : `[${node.badge}]`;
}

export function renderCount(node: TreeNode): string {
  if (node.useCount === null) return "";
  return node.kind === "parameter" ? `${node.useCount} explicit` : `${node.useCount} uses`;
}

/** One tree row: marker, indented label, badge, count. */
export function renderNodeLine(node: TreeNode, state: TreeViewState, depth: number): string {
  const marker =
    node.children.length === 0 ? "  " : state.expanded.has(node.target) ? "v " : "> ";
  const selected = state.selection === node.target ? "* " : "";
  const parts = [selected + node.label, renderBadge(node), renderCount(node)].filter(
    (s) => s !== "",
  );
  return "  ".repeat(depth) + marker + parts.join(" ");
}

export interface TreeRow {
  target: string;
  depth: number;
  line: string;
}

/**
 * Rows for the tree pane: visible nodes whose ancestors are expanded, in
 * document order. `visible` comes from applyFilters.
 */
export function renderTree(
  index: ModelIndex,
  state: TreeViewState,
  visible: readonly string[],
): TreeRow[] {
  const visibleSet = new Set(visible);
  const rows: TreeRow[] = [];
  const depths = new Map<string, number>();
  for (const target of index.order) {
    if (!visibleSet.has(target)) continue;
    const node = index.nodes.get(target)!;
    const parentDepth = node.parent !== null ? depths.get(node.parent) : undefined;
    const depth = parentDepth === undefined ? 0 : parentDepth + 1;
    depths.set(target, depth);
    if (node.parent !== null) {
      // A row shows only when every ancestor is expanded.
      let cursor: TreeNode | undefined = index.nodes.get(node.parent);
      let hidden = false;
      while (cursor !== undefined) {
        if (!state.expanded.has(cursor.target)) {
          hidden = true;
          break;
        }
        cursor = cursor.parent !== null ? index.nodes.get(cursor.parent) : undefined;
      }
      if (hidden) continue;
    }
    rows.push({ target, depth, line: renderNodeLine(node, state, depth) });
  }
  return rows;
}

export function renderAnnotation(a: AnnotationJson): string {
  const extras: string[] = [];
  if (a.baked_value !== undefined) extras.push(`baked ${a.baked_value.text}`);
  if (a.default_override !== undefined) extras.push(`default ${a.default_override.text}`);
  if (a.group !== undefined) {
    extras.push(`${a.group.group_name}(${a.group.variants.length} variants)`);
  }
  if (a.enum !== undefined) {
    extras.push(`${a.enum.enum_name}{${a.enum.members.map((m) => m.member_name).join(", ")}}`);
  }
  if (a.destination_module !== undefined) extras.push(`to ${a.destination_module}`);
  const payload = extras.length > 0 ? ` ${extras.join(", ")}` : "";
  return `@${a.kind} ${a.target}${payload} (${a.origin})`;
}

export function renderDiagnostic(d: DiagnosticJson): string {
  const where = d.target === "" ? "" : ` ${d.target}`;
  return `${d.severity}${where}: ${d.message}`;
}

export function renderDiagnostics(diagnostics: readonly DiagnosticJson[]): string[] {
  return diagnostics.map(renderDiagnostic);
}
