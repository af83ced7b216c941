/**
 * Canonical JSON bytes, matching the backend exactly.
 *
 * Every artifact the backend writes or serves uses one byte layout: UTF-8,
 * keys sorted by code point, two-space indent, `": "` after keys, empty
 * containers inline, and a trailing newline. Reproducing that layout here
 * makes "export equals what the server stores" a byte comparison.
 */

export type Json = null | boolean | number | string | Json[] | JsonObject;
export interface JsonObject {
  [key: string]: Json;
}

const SHORT_ESCAPES: Record<number, string> = {
  0x08: "\\b",
  0x09: "\\t",
  0x0a: "\\n",
  0x0c: "\\f",
  0x0d: "\\r",
  0x22: '\\"',
  0x5c: "\\\\",
};

function escapeString(value: string): string {
  let out = '"';
  for (const ch of value) {
    const cp = ch.codePointAt(0)!;
    const short = SHORT_ESCAPES[cp];
    if (short !== undefined) {
      out += short;
    } else if (cp < 0x20) {
      out += "\\u" + cp.toString(16).padStart(4, "0");
    } else {
      out += ch;
    }
  }
  return out + '"';
}

/** Code-point order, the sort the backend applies to object keys. */
export function codePointCompare(a: string, b: string): number {
  const as = [...a];
  const bs = [...b];
  const n = Math.min(as.length, bs.length);
  for (let i = 0; i < n; i++) {
    const d = (as[i] as string).codePointAt(0)! - (bs[i] as string).codePointAt(0)!;
    if (d !== 0) return d;
  }
  return as.length - bs.length;
}

function formatNumber(value: number): string {
  if (!Number.isFinite(value)) {
    throw new Error(`canonical JSON cannot hold non-finite number: ${value}`);
  }
  if (!Number.isInteger(value)) {
    // These documents only ever carry integers (counts, positions); a float
    // here would round-trip differently and silently break byte parity.
    throw new Error(`canonical JSON documents carry integers only, got ${value}`);
  }
  return Object.is(value, -0) ? "0" : String(value);
}

function serialize(value: unknown, indent: string): string {
  if (value === null) return "null";
  switch (typeof value) {
    case "boolean":
      return value ? "true" : "false";
    case "number":
      return formatNumber(value);
    case "string":
      return escapeString(value);
    case "object":
      break;
    default:
      throw new Error(`not JSON-serializable: ${typeof value}`);
  }
  const inner = indent + "  ";
  if (Array.isArray(value)) {
    if (value.length === 0) return "[]";
    const items = value.map((item) => inner + serialize(item, inner));
    return "[\n" + items.join(",\n") + "\n" + indent + "]";
  }
  const record = value as Record<string, unknown>;
  const keys = Object.keys(record).filter((k) => record[k] !== undefined);
  if (keys.length === 0) return "{}";
  keys.sort(codePointCompare);
  const items = keys.map(
    (k) => inner + escapeString(k) + ": " + serialize(record[k], inner),
  );
  return "{\n" + items.join(",\n") + "\n" + indent + "}";
}

export function canonicalText(value: unknown): string {
  return serialize(value, "") + "\n";
}

export function canonicalBytes(value: unknown): Uint8Array {
  return new TextEncoder().encode(canonicalText(value));
}

export function bytesEqual(a: Uint8Array, b: Uint8Array): boolean {
  if (a.length !== b.length) return false;
  for (let i = 0; i < a.length; i++) {
    if (a[i] !== b[i]) return false;
  }
  return true;
}
