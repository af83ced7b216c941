/**
 * Annotation forms: which kinds a node accepts, prefill helpers, and a
 * client-side mirror of the server's validation rules.
 *
 * The mirror is deliberately the same checks in the same order, so a set the
 * forms accept is a set the server accepts. Where Python is laxer (unicode
 * identifiers), the mirror stays stricter, never the other way around.
 */

import type { ModelIndex, TreeNode } from "./tree.js";
import { PARAM_SEP } from "./tree.js";
import type {
  AnnotationJson,
  AnnotationKind,
  DiagnosticJson,
  EnumSpecJson,
  GroupSpecJson,
  LiteralValueJson,
  ParameterJson,
  ValidationResultJson,
} from "./types.js";

export const ANNOTATION_KINDS: AnnotationKind[] = ["remove", "attribute", "group", "enum", "move"];

const PLAIN_LITERAL_TAGS = new Set(["none", "bool", "int", "float", "string"]);
const UPPER_SNAKE_RE = /^[A-Z][A-Z0-9_]*$/;
const IDENTIFIER_RE = /^[A-Za-z_][A-Za-z0-9_]*$/;

export function isIdentifier(text: string): boolean {
  return IDENTIFIER_RE.test(text);
}

function isVariadic(param: ParameterJson): boolean {
  return param.kind === "var_positional" || param.kind === "var_keyword";
}

function isPositionalOnly(param: ParameterJson): boolean {
  return param.kind === "positional_only";
}

function pyRepr(text: string): string {
  return "'" + text.replace(/\\/g, "\\\\").replace(/'/g, "\\'") + "'";
}

// ----- literal texts ----------------------------------------------------------

const STRING_ESCAPES: Record<string, string> = {
  "\\": "\\",
  "'": "'",
  n: "\n",
  r: "\r",
  t: "\t",
};

/** Inverse of the backend's single-quoted normal form; null when not one. */
export function parseStringLiteral(text: string): string | null {
  if (text.length < 2 || !text.startsWith("'") || !text.endsWith("'")) {
    return null;
  }
  let out = "";
  let i = 1;
  const end = text.length - 1;
  while (i < end) {
    const ch = text[i]!;
    if (ch === "\\") {
      const next = text[i + 1];
      if (next !== undefined && next in STRING_ESCAPES) {
        out += STRING_ESCAPES[next]!;
        i += 2;
      } else if (next === "x" && i + 3 < text.length) {
        const code = Number.parseInt(text.slice(i + 2, i + 4), 16);
        if (Number.isNaN(code)) return null;
        out += String.fromCharCode(code);
        i += 4;
      } else {
        return null;
      }
    } else if (ch === "'") {
      return null;
    } else {
      out += ch;
      i += 1;
    }
  }
  return i === end ? out : null;
}

/** The backend's deterministic single-quoted form. */
export function quoteString(value: string): string {
  let out = "'";
  for (const ch of value) {
    const code = ch.codePointAt(0)!;
    if (ch === "\\") out += "\\\\";
    else if (ch === "'") out += "\\'";
    else if (ch === "\n") out += "\\n";
    else if (ch === "\r") out += "\\r";
    else if (ch === "\t") out += "\\t";
    else if (code < 0x20 || code === 0x7f) out += "\\x" + code.toString(16).padStart(2, "0");
    else out += ch;
  }
  return out + "'";
}

/**
 * Interpret one form input as a plain literal. Accepts None, True/False,
 * integers, floats, and quoted or bare strings (bare text becomes a string).
 */
export function literalFromInput(raw: string): LiteralValueJson {
  const text = raw.trim();
  if (text === "None") return { tag: "none", text: "None" };
  if (text === "True" || text === "False") return { tag: "bool", text };
  if (/^[+-]?[0-9]+$/.test(text)) {
    return { tag: "int", text: BigInt(text).toString() };
  }
  if (/^[+-]?([0-9]+\.[0-9]*|\.[0-9]+|[0-9]+)([eE][+-]?[0-9]+)?$/.test(text)) {
    return { tag: "float", text };
  }
  const quoted = parseStringLiteral(text);
  if (quoted !== null) return { tag: "string", text: quoteString(quoted) };
  return { tag: "string", text: quoteString(text) };
}

// ----- form availability -------------------------------------------------------

export interface KindOption {
  kind: AnnotationKind;
  enabled: boolean;
  /** Why the form is disabled; null when enabled. */
  reason: string | null;
}

function compatibleKinds(index: ModelIndex, node: TreeNode): Map<AnnotationKind, string | null> {
  const out = new Map<AnnotationKind, string | null>();
  const no = (kind: AnnotationKind, reason: string) => out.set(kind, reason);
  const yes = (kind: AnnotationKind) => out.set(kind, null);

  yes("remove");
  switch (node.kind) {
    case "module":
      no("attribute", "attribute targets constructor parameters");
      no("group", "groups target callables");
      no("enum", "enums target parameters");
      no("move", "move targets classes or module-level functions");
      break;
    case "class":
      no("attribute", "attribute targets constructor parameters");
      no("group", "groups target callables");
      no("enum", "enums target parameters");
      yes("move");
      break;
    case "callable": {
      no("attribute", "attribute targets constructor parameters");
      no("enum", "enums target parameters");
      const groupable = node.callable!.parameters.some(
        (p) => !isVariadic(p) && !isPositionalOnly(p),
      );
      if (groupable) yes("group");
      else no("group", "no groupable parameters");
      if (node.role === "function") yes("move");
      else no("move", "move targets classes or module-level functions");
      break;
    }
    case "parameter": {
      no("group", "groups target callables");
      no("move", "move targets classes or module-level functions");
      const param = node.param!;
      const owner = node.parent === null ? undefined : index.nodes.get(node.parent);
      if (isVariadic(param)) {
        no("attribute", "variadic parameters cannot become attributes");
        no("enum", "variadic parameters cannot be enums");
      } else if (isPositionalOnly(param)) {
        no("attribute", "positional-only parameters cannot become attributes");
        no("enum", "positional-only parameters cannot be enums");
      } else {
        yes("enum");
        if (owner?.role === "constructor") yes("attribute");
        else no("attribute", "attribute targets constructor parameters");
      }
      break;
    }
  }
  return out;
}

/** Parameter targets claimed by group annotations in the set. */
export function groupClaims(annotations: readonly AnnotationJson[]): Map<string, string> {
  const claims = new Map<string, string>();
  for (const a of annotations) {
    if (a.kind !== "group" || a.group === undefined) continue;
    claims.set(a.target + PARAM_SEP + a.group.discriminator_param, a.target);
    for (const variant of a.group.variants) {
      for (const member of variant.member_params) {
        claims.set(a.target + PARAM_SEP + member, a.target);
      }
    }
  }
  return claims;
}

/**
 * Form availability for one node under the current working set: incompatible
 * kinds, already-annotated targets, and group-claimed parameters all disable.
 */
export function kindOptions(
  index: ModelIndex,
  target: string,
  working: readonly AnnotationJson[],
): KindOption[] {
  const node = index.nodes.get(target);
  if (node === undefined) {
    return ANNOTATION_KINDS.map((kind) => ({ kind, enabled: false, reason: "unknown target" }));
  }
  const compat = compatibleKinds(index, node);
  const hasOther = working.some((a) => a.target === target && a.kind !== "move");
  const hasMove = working.some((a) => a.target === target && a.kind === "move");
  const claimedBy = groupClaims(working).get(target);

  return ANNOTATION_KINDS.map((kind) => {
    // null means compatible; a missing entry means the kind never applies.
    let reason = compat.has(kind) ? (compat.get(kind) as string | null) : "not applicable";
    if (reason === null && kind === "move" && hasMove) {
      reason = "target already has a move annotation";
    }
    if (reason === null && kind !== "move" && hasOther) {
      reason = "target already has an annotation";
    }
    if (reason === null && kind !== "group" && claimedBy !== undefined) {
      reason = `parameter is claimed by the group on ${claimedBy}`;
    }
    return { kind, enabled: reason === null, reason };
  });
}

// ----- prefill -----------------------------------------------------------------

/** UPPER_SNAKE member name derived from a string value. */
export function memberNameFor(value: string): string {
  let name = value.toUpperCase().replace(/[^A-Z0-9]+/g, "_");
  name = name.replace(/^_+/, "").replace(/_+$/, "");
  if (name === "") name = "EMPTY";
  if (!/^[A-Z]/.test(name)) name = "V_" + name;
  return name;
}

/**
 * Enum spec seeded from the mined value set: every observed string literal
 * becomes a member. Null when the node has no observed string values.
 */
export function prefillEnum(index: ModelIndex, target: string): EnumSpecJson | null {
  const node = index.nodes.get(target);
  if (node === undefined || node.kind !== "parameter" || node.values === null) {
    return null;
  }
  const members: { member_name: string; string_value: string }[] = [];
  const seenNames = new Set<string>();
  for (const text of node.values) {
    const value = parseStringLiteral(text);
    if (value === null) continue;
    let name = memberNameFor(value);
    let n = 2;
    while (seenNames.has(name)) {
      name = memberNameFor(value) + "_" + n;
      n += 1;
    }
    seenNames.add(name);
    members.push({ member_name: name, string_value: value });
  }
  if (members.length === 0) return null;
  const paramName = node.param!.name;
  return { enum_name: defaultEnumName(paramName), members };
}

/** CamelCase type name derived from the parameter name. */
export function defaultEnumName(paramName: string): string {
  const parts = paramName.split(/[^A-Za-z0-9]+/).filter((p) => p !== "");
  const name = parts.map((p) => p.charAt(0).toUpperCase() + p.slice(1)).join("");
  return name === "" || !/^[A-Za-z_]/.test(name) ? "Choice" : name;
}

/**
 * Enum members from one form line each: `NAME = value`. Lines without `=`
 * take the member name from the value (`gini` -> GINI = gini).
 */
export function parseEnumMembers(text: string): EnumSpecJson["members"] {
  const members: EnumSpecJson["members"] = [];
  for (const rawLine of text.split("\n")) {
    const line = rawLine.trim();
    if (line === "") continue;
    const eq = line.indexOf("=");
    if (eq === -1) {
      members.push({ member_name: memberNameFor(line), string_value: line });
    } else {
      members.push({
        member_name: line.slice(0, eq).trim(),
        string_value: line.slice(eq + 1).trim(),
      });
    }
  }
  return members;
}

/**
 * Group variants from one form line each:
 * `variant_name = discriminator_value: member, member`.
 */
export function parseGroupVariants(text: string): GroupSpecJson["variants"] {
  const variants: GroupSpecJson["variants"] = [];
  for (const rawLine of text.split("\n")) {
    const line = rawLine.trim();
    if (line === "") continue;
    const eq = line.indexOf("=");
    const head = eq === -1 ? line : line.slice(0, eq).trim();
    const rest = eq === -1 ? head : line.slice(eq + 1).trim();
    const colon = rest.indexOf(":");
    const value = colon === -1 ? rest : rest.slice(0, colon).trim();
    const memberText = colon === -1 ? "" : rest.slice(colon + 1);
    const members = memberText
      .split(",")
      .map((m) => m.trim())
      .filter((m) => m !== "");
    variants.push({ variant_name: head, discriminator_value: value, member_params: members });
  }
  return variants;
}

// ----- draft builders ------------------------------------------------------------

export function makeRemove(target: string, bakedValue?: LiteralValueJson): AnnotationJson {
  const out: AnnotationJson = { target, kind: "remove", origin: "manual" };
  if (bakedValue !== undefined) out.baked_value = bakedValue;
  return out;
}

export function makeAttribute(target: string, defaultOverride?: LiteralValueJson): AnnotationJson {
  const out: AnnotationJson = { target, kind: "attribute", origin: "manual" };
  if (defaultOverride !== undefined) out.default_override = defaultOverride;
  return out;
}

export function makeGroup(target: string, group: GroupSpecJson): AnnotationJson {
  return { target, kind: "group", origin: "manual", group };
}

export function makeEnum(target: string, spec: EnumSpecJson): AnnotationJson {
  return { target, kind: "enum", origin: "manual", enum: spec };
}

export function makeMove(target: string, destinationModule: string): AnnotationJson {
  return { target, kind: "move", origin: "manual", destination_module: destinationModule };
}

// ----- validation mirror ----------------------------------------------------------

class Result implements ValidationResultJson {
  errors: DiagnosticJson[] = [];
  warnings: DiagnosticJson[] = [];

  error(target: string, message: string): void {
    this.errors.push({ severity: "error", target, message });
  }

  warn(target: string, message: string): void {
    this.warnings.push({ severity: "warning", target, message });
  }
}

function ownerTexts(target: string): [string | null, string | null] {
  if (!target.includes(PARAM_SEP)) return [null, null];
  const owner = target.slice(0, target.indexOf(PARAM_SEP));
  if (owner.endsWith(".__init__")) {
    return [owner, owner.slice(0, -".__init__".length)];
  }
  return [owner, null];
}

function validateGroup(a: AnnotationJson, node: TreeNode, result: Result): void {
  const spec = a.group;
  if (spec === undefined) {
    result.error(a.target, "group annotation carries no group payload");
    return;
  }
  if (!isIdentifier(spec.group_name)) {
    result.error(a.target, `group_name is not an identifier: ${pyRepr(spec.group_name)}`);
  }
  const params = new Map(node.callable!.parameters.map((p) => [p.name, p]));
  const discriminator = params.get(spec.discriminator_param);
  if (discriminator === undefined) {
    result.error(a.target, `discriminator ${pyRepr(spec.discriminator_param)} is not a parameter`);
  } else if (isVariadic(discriminator) || isPositionalOnly(discriminator)) {
    result.error(a.target, `discriminator ${pyRepr(spec.discriminator_param)} cannot be grouped`);
  }
  if (spec.variants.length === 0) {
    result.error(a.target, "group needs at least one variant");
  }
  const seenVariants = new Set<string>();
  const seenValues = new Set<string>();
  const seenMembers = new Set<string>();
  for (const variant of spec.variants) {
    if (!isIdentifier(variant.variant_name)) {
      result.error(a.target, `variant name is not an identifier: ${pyRepr(variant.variant_name)}`);
    }
    if (seenVariants.has(variant.variant_name)) {
      result.error(a.target, `duplicate variant name: ${pyRepr(variant.variant_name)}`);
    }
    seenVariants.add(variant.variant_name);
    if (seenValues.has(variant.discriminator_value)) {
      result.error(
        a.target,
        `duplicate discriminator value: ${pyRepr(variant.discriminator_value)}`,
      );
    }
    seenValues.add(variant.discriminator_value);
    for (const member of variant.member_params) {
      if (member === spec.discriminator_param) {
        result.error(a.target, `variant member ${pyRepr(member)} is the discriminator`);
        continue;
      }
      if (seenMembers.has(member)) {
        result.error(a.target, `member ${pyRepr(member)} appears in more than one variant`);
      }
      seenMembers.add(member);
      const param = params.get(member);
      if (param === undefined) {
        result.error(a.target, `member ${pyRepr(member)} is not a parameter`);
      } else if (isVariadic(param) || isPositionalOnly(param)) {
        result.error(a.target, `member ${pyRepr(member)} cannot be grouped`);
      }
    }
  }
}

function validateEnum(a: AnnotationJson, param: ParameterJson, result: Result): void {
  const spec = a.enum;
  if (spec === undefined) {
    result.error(a.target, "enum annotation carries no enum payload");
    return;
  }
  if (!isIdentifier(spec.enum_name)) {
    result.error(a.target, `enum_name is not an identifier: ${pyRepr(spec.enum_name)}`);
  }
  if (spec.members.length === 0) {
    result.error(a.target, "enum needs at least one member");
  }
  const seenNames = new Set<string>();
  const seenValues = new Set<string>();
  for (const member of spec.members) {
    if (!UPPER_SNAKE_RE.test(member.member_name)) {
      result.error(a.target, `member name not UPPER_SNAKE: ${pyRepr(member.member_name)}`);
    }
    if (seenNames.has(member.member_name)) {
      result.error(a.target, `duplicate enum member name: ${pyRepr(member.member_name)}`);
    }
    seenNames.add(member.member_name);
    if (seenValues.has(member.string_value)) {
      result.error(a.target, `duplicate enum value: ${pyRepr(member.string_value)}`);
    }
    seenValues.add(member.string_value);
  }
  if (param.default !== null && !["string", "none", "opaque_literal"].includes(param.default.tag)) {
    result.warn(a.target, "enum target's default is not a string");
  }
}

/**
 * Same checks as the server, over the whole set. Errors block save; warnings
 * render inline but do not.
 */
export function validateSet(
  index: ModelIndex,
  annotations: readonly AnnotationJson[],
): ValidationResultJson {
  const result = new Result();
  const removedTargets = new Set(
    annotations.filter((a) => a.kind === "remove").map((a) => a.target),
  );

  for (const a of annotations) {
    if (!ANNOTATION_KINDS.includes(a.kind)) {
      result.error(a.target, `unknown annotation kind: ${pyRepr(a.kind)}`);
      continue;
    }
    if (a.origin !== "auto" && a.origin !== "manual") {
      result.error(a.target, `unknown origin: ${pyRepr(a.origin)}`);
    }
    const node = index.nodes.get(a.target);
    if (node === undefined) {
      result.error(a.target, "unknown target");
      continue;
    }
    if (!node.isPublic) {
      result.warn(a.target, "annotation on an internal element");
    }

    if (a.baked_value !== undefined && !(a.kind === "remove" && node.kind === "parameter")) {
      result.error(a.target, "baked_value is only valid for remove on a parameter");
    }
    if (a.baked_value !== undefined && !PLAIN_LITERAL_TAGS.has(a.baked_value.tag)) {
      result.error(a.target, `baked_value must be a plain literal, got ${a.baked_value.tag}`);
    }
    if (a.default_override !== undefined) {
      if (a.kind !== "attribute") {
        result.error(a.target, "default_override is only valid for attribute");
      } else if (!PLAIN_LITERAL_TAGS.has(a.default_override.tag)) {
        result.error(
          a.target,
          `default_override must be a plain literal, got ${a.default_override.tag}`,
        );
      }
    }

    if (a.kind === "remove") {
      if (node.kind === "parameter") {
        const param = node.param!;
        if (isVariadic(param) && a.baked_value !== undefined) {
          result.error(a.target, "variadic parameters cannot bake a value");
        }
        if (param.default === null && !isVariadic(param) && a.baked_value === undefined) {
          const [owner, ownerClass] = ownerTexts(a.target);
          if (
            (owner === null || !removedTargets.has(owner)) &&
            (ownerClass === null || !removedTargets.has(ownerClass))
          ) {
            result.error(a.target, "removing a required parameter needs a baked_value");
          }
        }
      }
      if ((node.kind === "class" || node.kind === "callable") && node.used === true) {
        result.warn(a.target, "removing an element with observed uses");
      }
    } else if (a.kind === "attribute") {
      const owner = node.parent === null ? undefined : index.nodes.get(node.parent);
      if (node.kind !== "parameter" || owner?.role !== "constructor") {
        result.error(a.target, "attribute annotations target constructor parameters");
      } else {
        const param = node.param!;
        if (isVariadic(param)) {
          result.error(a.target, "variadic parameters cannot become attributes");
        }
        if (isPositionalOnly(param)) {
          result.error(a.target, "positional-only parameters cannot become attributes");
        }
        const cls = owner.parent === null ? undefined : index.nodes.get(owner.parent);
        const methods = cls?.classInfo?.methods ?? [];
        if (!methods.some((m) => !m.constructor)) {
          result.warn(a.target, "class has no methods; attribute values can never be applied");
        }
      }
    } else if (a.kind === "group") {
      if (node.kind !== "callable") {
        result.error(a.target, "group annotations target callables");
      } else {
        validateGroup(a, node, result);
      }
    } else if (a.kind === "enum") {
      if (node.kind !== "parameter") {
        result.error(a.target, "enum annotations target parameters");
      } else if (isVariadic(node.param!)) {
        result.error(a.target, "variadic parameters cannot be enums");
      } else if (isPositionalOnly(node.param!)) {
        result.error(a.target, "positional-only parameters cannot be enums");
      } else {
        validateEnum(a, node.param!, result);
      }
    } else if (a.kind === "move") {
      const movable = node.kind === "class" || (node.kind === "callable" && node.role === "function");
      if (!movable) {
        result.error(a.target, "move annotations target classes or module-level functions");
      } else if (a.destination_module === undefined) {
        result.error(a.target, "move annotation carries no destination_module");
      } else {
        const dest = a.destination_module;
        const segments = dest.split(".");
        if (!segments.every(isIdentifier)) {
          result.error(a.target, `destination is not a module path: ${pyRepr(dest)}`);
        } else if (segments[0] !== index.library.name) {
          result.error(a.target, `destination must be inside ${index.library.name}: ${pyRepr(dest)}`);
        } else {
          const existing = index.nodes.get(dest);
          if (existing !== undefined && existing.kind !== "module") {
            result.error(a.target, `destination collides with ${dest}`);
          }
          const landing = `${dest}.${a.target.split(".").pop()}`;
          if (index.nodes.has(landing) && landing !== a.target) {
            result.error(a.target, `destination already defines ${landing}`);
          }
        }
      }
    }
  }

  // Set-level rules: one annotation per target per slot, group claims win.
  const moveSeen = new Set<string>();
  const otherSeen = new Set<string>();
  for (const a of annotations) {
    const slot = a.kind === "move" ? moveSeen : otherSeen;
    if (slot.has(a.target)) {
      result.error(a.target, "conflicting annotations on the same target");
    }
    slot.add(a.target);
  }
  const claims = groupClaims(annotations);
  for (const a of annotations) {
    if (a.kind !== "group" && claims.has(a.target)) {
      result.error(a.target, `parameter is claimed by the group on ${claims.get(a.target)}`);
    }
  }

  return result;
}
