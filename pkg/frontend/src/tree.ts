/**
 * API tree: an index of every element in the model plus the view state that
 * drives the browse pane (expansion, filters, selection).
 *
 * Filters compose conjunctively. A node "matches" when it satisfies every
 * active filter; ancestors of matches stay visible so the tree keeps its
 * shape. The selection is cleared whenever filtering hides it.
 */

import type {
  ApiModelJson,
  CallableJson,
  ClassificationJson,
  ClassJson,
  LibraryRef,
  ModuleJson,
  ParameterJson,
  UsagesJson,
} from "./types.js";

export const PARAM_SEP = "#";

export type NodeKind = "module" | "class" | "callable" | "parameter";
export type CallableRole = "constructor" | "method" | "function";
export type Badge = "unused" | "useless" | "useful";

export interface TreeNode {
  target: string;
  kind: NodeKind;
  label: string;
  parent: string | null;
  children: string[];
  isPublic: boolean;
  /** Resolved uses (explicit occurrences for parameters); null for modules and internal elements. */
  useCount: number | null;
  badge: Badge | null;
  /** Classification flags, present only for public classified elements. */
  used: boolean | null;
  useful: boolean | null;
  /** Distinct observed value texts (parameters only). */
  values: string[] | null;
  role: CallableRole | null;
  module?: ModuleJson;
  classInfo?: ClassJson;
  callable?: CallableJson;
  param?: ParameterJson;
}

export interface ModelIndex {
  library: LibraryRef;
  /** Module targets in document order. */
  roots: string[];
  /** Every target in document order (depth first). */
  order: string[];
  nodes: Map<string, TreeNode>;
}

function isPrivateSegment(segment: string): boolean {
  if (segment.startsWith("__") && segment.endsWith("__") && segment.length > 4) {
    return false;
  }
  return segment.startsWith("_");
}

function segmentsPublic(qname: string): boolean {
  return !qname.split(".").some(isPrivateSegment);
}

export function buildIndex(
  model: ApiModelJson,
  classification: ClassificationJson,
  usages: UsagesJson,
): ModelIndex {
  const nodes = new Map<string, TreeNode>();
  const order: string[] = [];
  const roots: string[] = [];

  function add(node: TreeNode): TreeNode {
    nodes.set(node.target, node);
    order.push(node.target);
    return node;
  }

  function addParameter(owner: TreeNode, param: ParameterJson): void {
    const target = owner.target + PARAM_SEP + param.name;
    const use = classification.parameters[target];
    const node = add({
      target,
      kind: "parameter",
      label: param.name,
      parent: owner.target,
      children: [],
      isPublic: use !== undefined,
      useCount: use ? use.explicit_count : null,
      badge: null,
      used: use ? use.used : null,
      useful: use ? use.useful : null,
      values: use ? use.values : null,
      role: null,
      param,
    });
    if (use) {
      node.badge = !use.used ? "unused" : use.useful ? "useful" : "useless";
    }
    owner.children.push(target);
  }

  function addCallable(owner: TreeNode, fn: CallableJson, role: CallableRole): void {
    const use = classification.callables[fn.qname];
    const counts = usages.callables[fn.qname];
    const node = add({
      target: fn.qname,
      kind: "callable",
      label: fn.qname.split(".").pop() ?? fn.qname,
      parent: owner.target,
      children: [],
      isPublic: use !== undefined,
      useCount: use ? (counts ? counts.count : 0) : null,
      badge: use && !use.used ? "unused" : null,
      used: use ? use.used : null,
      useful: null,
      values: null,
      role,
      callable: fn,
    });
    owner.children.push(fn.qname);
    for (const param of fn.parameters) {
      addParameter(node, param);
    }
  }

  for (const mod of model.modules) {
    const modNode = add({
      target: mod.qname,
      kind: "module",
      label: mod.qname,
      parent: null,
      children: [],
      isPublic: segmentsPublic(mod.qname),
      useCount: null,
      badge: null,
      used: null,
      useful: null,
      values: null,
      role: null,
      module: mod,
    });
    roots.push(mod.qname);
    for (const cls of mod.classes) {
      const use = classification.classes[cls.qname];
      const counts = usages.classes[cls.qname];
      const clsNode = add({
        target: cls.qname,
        kind: "class",
        label: cls.qname.split(".").pop() ?? cls.qname,
        parent: mod.qname,
        children: [],
        isPublic: use !== undefined,
        useCount: use ? (counts ? counts.count : 0) : null,
        badge: use && !use.used ? "unused" : null,
        used: use ? use.used : null,
        useful: null,
        values: null,
        role: null,
        classInfo: cls,
      });
      modNode.children.push(cls.qname);
      for (const method of cls.methods) {
        addCallable(clsNode, method, method.constructor ? "constructor" : "method");
      }
    }
    for (const fn of mod.functions) {
      addCallable(modNode, fn, "function");
    }
  }

  return { library: model.library, roots, order, nodes };
}

// ----- filters and view state ------------------------------------------------

export interface TreeFilters {
  publicness: "all" | "public" | "internal";
  usage: "all" | "used" | "unused";
  parameterUtility: "all" | "useful" | "useless";
  annotated: "all" | "annotated" | "unannotated";
  search: string;
}

export interface TreeViewState {
  expanded: Set<string>;
  filters: TreeFilters;
  selection: string | null;
}

export function defaultFilters(): TreeFilters {
  return {
    publicness: "all",
    usage: "all",
    parameterUtility: "all",
    annotated: "all",
    search: "",
  };
}

export function createViewState(): TreeViewState {
  return { expanded: new Set(), filters: defaultFilters(), selection: null };
}

/**
 * Whether a node satisfies every active filter. A filter that cannot apply
 * to the node's kind (usage on a module, utility on a class) rejects the
 * node; such nodes still show up as ancestors of real matches.
 */
export function nodeMatches(
  node: TreeNode,
  filters: TreeFilters,
  annotatedTargets: ReadonlySet<string>,
): boolean {
  if (filters.publicness === "public" && !node.isPublic) return false;
  if (filters.publicness === "internal" && node.isPublic) return false;

  if (filters.usage !== "all") {
    if (node.used === null) return false;
    if (filters.usage === "used" ? !node.used : node.used) return false;
  }

  if (filters.parameterUtility !== "all") {
    if (node.kind !== "parameter" || node.useful === null) return false;
    if (filters.parameterUtility === "useful" ? !node.useful : node.useful) return false;
  }

  if (filters.annotated === "annotated" && !annotatedTargets.has(node.target)) return false;
  if (filters.annotated === "unannotated" && annotatedTargets.has(node.target)) return false;

  if (filters.search !== "") {
    if (!node.target.toLowerCase().includes(filters.search.toLowerCase())) return false;
  }
  return true;
}

/** Targets that match the filters, in document order. */
export function matchingTargets(
  index: ModelIndex,
  filters: TreeFilters,
  annotatedTargets: ReadonlySet<string>,
): string[] {
  const out: string[] = [];
  for (const target of index.order) {
    const node = index.nodes.get(target);
    if (node && nodeMatches(node, filters, annotatedTargets)) {
      out.push(target);
    }
  }
  return out;
}

/** Matches plus their ancestors, in document order. */
export function visibleTargets(
  index: ModelIndex,
  filters: TreeFilters,
  annotatedTargets: ReadonlySet<string>,
): string[] {
  const visible = new Set<string>();
  for (const target of matchingTargets(index, filters, annotatedTargets)) {
    let cursor: string | null = target;
    while (cursor !== null && !visible.has(cursor)) {
      visible.add(cursor);
      const node: TreeNode | undefined = index.nodes.get(cursor);
      cursor = node ? node.parent : null;
    }
  }
  return index.order.filter((target) => visible.has(target));
}

/**
 * Recompute the visible set and enforce the selection invariant: a selection
 * that filtering hid is cleared.
 */
export function applyFilters(
  state: TreeViewState,
  index: ModelIndex,
  annotatedTargets: ReadonlySet<string>,
): string[] {
  const visible = visibleTargets(index, state.filters, annotatedTargets);
  if (state.selection !== null && !visible.includes(state.selection)) {
    state.selection = null;
  }
  return visible;
}

export function toggleExpanded(state: TreeViewState, target: string): void {
  if (state.expanded.has(target)) {
    state.expanded.delete(target);
  } else {
    state.expanded.add(target);
  }
}

/** Ancestor chain from root to the node, excluding the node itself. */
export function ancestorsOf(index: ModelIndex, target: string): string[] {
  const chain: string[] = [];
  let cursor = index.nodes.get(target)?.parent ?? null;
  while (cursor !== null) {
    chain.unshift(cursor);
    cursor = index.nodes.get(cursor)?.parent ?? null;
  }
  return chain;
}

/** Select a node and expand its ancestors so it is on screen. */
export function select(state: TreeViewState, index: ModelIndex, target: string | null): void {
  state.selection = target;
  if (target !== null) {
    for (const ancestor of ancestorsOf(index, target)) {
      state.expanded.add(ancestor);
    }
  }
}
