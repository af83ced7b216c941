"""Version-to-version API diffing, deprecation mining, annotation migration.

Deprecation facts come from three detectors applied per element in priority
order; the first one that fires wins:

1. A ``.. deprecated:: <version>`` docstring directive. Its indented body is
   scanned for a replacement ("use <name> instead") and a removal version
   ("removed in <version>").
2. A decorator literally named ``deprecated`` (bare or dotted). The version
   is the first version-shaped string argument, else "unknown".
3. Docstring sentences: "deprecated since [version] <v>" and "will be
   removed in [version] <v>". Deprecation-like prose that yields no version
   still produces a fact, with empty versions and an explanatory note.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Optional

from .annotations import Annotation, AnnotationSet
from .jsonutil import SCHEMA_MIGRATION
from .model import ApiModel, Callable, PARAM_SEP, Parameter

_VERSION_RE = re.compile(r"^[0-9]+(?:\.[0-9]+)*$")
_DIRECTIVE_RE = re.compile(r"^(\s*)\.\.\s+deprecated::\s*(\S+)\s*$")
_SINCE_RE = re.compile(r"deprecated\s+since\s+(?:version\s+)?v?([0-9]+(?:\.[0-9]+)*)", re.I)
_REMOVED_RE = re.compile(r"removed\s+in\s+(?:version\s+)?v?([0-9]+(?:\.[0-9]+)*)", re.I)
_REPLACEMENT_RE = re.compile(r"use\s+[`'\"]?([A-Za-z_][A-Za-z0-9_.]*)[`'\"]?\s+instead", re.I)
_DEPRECATION_HINT_RE = re.compile(r"deprecat", re.I)

UNKNOWN_VERSION = "unknown"


def version_key(version: str) -> tuple:
    """Sort key giving a total order over version strings.

    Dotted numerals compare numerically segment by segment; non-numeric
    segments (and placeholders like "unknown") sort after numeric ones.
    """
    key = []
    for segment in str(version).split("."):
        if segment.isdigit():
            key.append((0, int(segment), ""))
        else:
            key.append((1, 0, segment))
    return tuple(key)


@dataclass(frozen=True)
class DeprecationFact:
    target: str
    since_version: str
    removal_version: Optional[str] = None
    replacement: Optional[str] = None
    note: Optional[str] = None

    def to_json(self) -> dict:
        data = {"target": self.target, "since_version": self.since_version}
        if self.removal_version is not None:
            data["removal_version"] = self.removal_version
        if self.replacement is not None:
            data["replacement"] = self.replacement
        if self.note is not None:
            data["note"] = self.note
        return data

    @staticmethod
    def from_json(data: dict) -> "DeprecationFact":
        return DeprecationFact(
            target=data["target"],
            since_version=data["since_version"],
            removal_version=data.get("removal_version"),
            replacement=data.get("replacement"),
            note=data.get("note"),
        )


# ---------------------------------------------------------------------------
# Deprecation extraction
# ---------------------------------------------------------------------------


def _fact_from_directive(target: str, docstring: str) -> Optional[DeprecationFact]:
    lines = docstring.splitlines()
    for index, line in enumerate(lines):
        match = _DIRECTIVE_RE.match(line)
        if match is None:
            continue
        indent = len(match.group(1))
        body_lines = []
        for follower in lines[index + 1 :]:
            if not follower.strip():
                if body_lines:
                    body_lines.append("")
                continue
            if len(follower) - len(follower.lstrip()) <= indent:
                break
            body_lines.append(follower.strip())
        body = " ".join(body_lines).strip()
        removal = _REMOVED_RE.search(body)
        replacement = _REPLACEMENT_RE.search(body)
        return DeprecationFact(
            target=target,
            since_version=match.group(2),
            removal_version=removal.group(1) if removal else None,
            replacement=replacement.group(1) if replacement else None,
        )
    return None


def _decorator_base(text: str) -> str:
    head = text.split("(", 1)[0].strip()
    return head.rsplit(".", 1)[-1]


def _fact_from_decorators(target: str, decorators: tuple[str, ...]) -> Optional[DeprecationFact]:
    for text in decorators:
        if _decorator_base(text) != "deprecated":
            continue
        version = None
        replacement = None
        for literal in re.findall(r"""['"]([^'"]*)['"]""", text):
            if version is None and _VERSION_RE.match(literal):
                version = literal
                continue
            found = _REPLACEMENT_RE.search(literal)
            if found and replacement is None:
                replacement = found.group(1)
        if version is None:
            return DeprecationFact(
                target=target,
                since_version=UNKNOWN_VERSION,
                replacement=replacement,
                note="deprecation decorator carries no version",
            )
        return DeprecationFact(target=target, since_version=version, replacement=replacement)
    return None


def _fact_from_sentences(target: str, docstring: str) -> Optional[DeprecationFact]:
    if not _DEPRECATION_HINT_RE.search(docstring):
        return None
    since = _SINCE_RE.search(docstring)
    removal = _REMOVED_RE.search(docstring)
    replacement = _REPLACEMENT_RE.search(docstring)
    if since is None and removal is None:
        return DeprecationFact(
            target=target,
            since_version="",
            replacement=replacement.group(1) if replacement else None,
            note="deprecation-like text without a parsable version",
        )
    return DeprecationFact(
        target=target,
        since_version=since.group(1) if since else "",
        removal_version=removal.group(1) if removal else None,
        replacement=replacement.group(1) if replacement else None,
    )


def _fact_for_element(target: str, docstring: Optional[str], decorators: tuple[str, ...]):
    if docstring:
        fact = _fact_from_directive(target, docstring)
        if fact is not None:
            return fact
    fact = _fact_from_decorators(target, decorators)
    if fact is not None:
        return fact
    if docstring:
        return _fact_from_sentences(target, docstring)
    return None


def extract_deprecations(model: ApiModel) -> list[DeprecationFact]:
    """Collect deprecation facts for every documented element, sorted by target."""
    facts = []
    for mod in model.modules:
        for cls in mod.classes:
            fact = _fact_for_element(cls.qname.render(), cls.docstring, cls.decorators)
            if fact is not None:
                facts.append(fact)
            for method in cls.methods:
                fact = _fact_for_element(
                    method.qname.render(), method.docstring, method.decorators
                )
                if fact is not None:
                    facts.append(fact)
        for fn in mod.functions:
            fact = _fact_for_element(fn.qname.render(), fn.docstring, fn.decorators)
            if fact is not None:
                facts.append(fact)
    facts.sort(key=lambda f: f.target)
    return facts


# ---------------------------------------------------------------------------
# Diff
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SignatureChange:
    qname: str
    old_params: tuple[Parameter, ...]
    new_params: tuple[Parameter, ...]

    def to_json(self) -> dict:
        return {
            "qname": self.qname,
            "old_params": [p.to_json() for p in self.old_params],
            "new_params": [p.to_json() for p in self.new_params],
        }


@dataclass(frozen=True)
class ApiDiff:
    library_name: str
    old_version: str
    new_version: str
    added: tuple[str, ...] = ()
    removed: tuple[str, ...] = ()
    deprecated: tuple[DeprecationFact, ...] = ()
    signature_changed: tuple[SignatureChange, ...] = ()

    @property
    def empty(self) -> bool:
        return not (self.added or self.removed or self.deprecated or self.signature_changed)

    def to_json_dict(self) -> dict:
        return {
            "added": list(self.added),
            "removed": list(self.removed),
            "deprecated": [f.to_json() for f in self.deprecated],
            "signature_changed": [c.to_json() for c in self.signature_changed],
        }


def _structural_texts(model: ApiModel) -> dict[str, object]:
    """Module, class, and callable elements by text; parameters change a
    signature rather than appearing as standalone additions or removals."""
    out: dict[str, object] = {}
    for mod in model.modules:
        out[mod.qname.render()] = mod
        for cls in mod.classes:
            out[cls.qname.render()] = cls
            for method in cls.methods:
                out[method.qname.render()] = method
        for fn in mod.functions:
            out[fn.qname.render()] = fn
    return out


def diff_api(old: ApiModel, new: ApiModel) -> ApiDiff:
    if old.library_name != new.library_name:
        raise ValueError(
            f"cannot diff different libraries: {old.library_name} vs {new.library_name}"
        )
    old_elements = _structural_texts(old)
    new_elements = _structural_texts(new)
    added = tuple(sorted(set(new_elements) - set(old_elements)))
    removed = tuple(sorted(set(old_elements) - set(new_elements)))
    changed = []
    for text in sorted(set(old_elements) & set(new_elements)):
        before, after = old_elements[text], new_elements[text]
        if not (isinstance(before, Callable) and isinstance(after, Callable)):
            continue
        if before.parameters != after.parameters:
            changed.append(
                SignatureChange(
                    qname=text, old_params=before.parameters, new_params=after.parameters
                )
            )
    return ApiDiff(
        library_name=old.library_name,
        old_version=old.library_version,
        new_version=new.library_version,
        added=added,
        removed=removed,
        deprecated=tuple(extract_deprecations(new)),
        signature_changed=tuple(changed),
    )


# ---------------------------------------------------------------------------
# Migration
# ---------------------------------------------------------------------------


@dataclass
class ConflictReport:
    dropped: list[dict] = field(default_factory=list)
    needs_review: list[dict] = field(default_factory=list)
    unannotated_additions: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "dropped": list(self.dropped),
            "needs_review": list(self.needs_review),
            "unannotated_additions": list(self.unannotated_additions),
        }


def _under(target: str, prefix: str) -> bool:
    return (
        target == prefix
        or target.startswith(prefix + ".")
        or target.startswith(prefix + PARAM_SEP)
    )


def _retarget(target: str, old_prefix: str, new_prefix: str) -> str:
    if target == old_prefix:
        return new_prefix
    return new_prefix + target[len(old_prefix):]


def migrate_annotations(
    aset: AnnotationSet, diff: ApiDiff, facts: Optional[list[DeprecationFact]] = None
) -> tuple[AnnotationSet, ConflictReport]:
    """Carry an annotation set across a library version bump.

    Every input annotation lands either in the migrated set or in the
    conflict report's dropped list, exactly once.
    """
    if facts is None:
        facts = list(diff.deprecated)
    report = ConflictReport(unannotated_additions=sorted(diff.added))
    replacements = [f for f in facts if f.replacement]
    deprecations_without = [f for f in facts if not f.replacement]
    changed_by_qname = {c.qname: c for c in diff.signature_changed}

    migrated: list[Annotation] = []
    for a in aset.annotations:
        removed_prefix = next((r for r in diff.removed if _under(a.target, r)), None)
        if removed_prefix is not None:
            report.dropped.append(
                {
                    "target": a.target,
                    "kind": a.kind,
                    "reason": f"target removed in {diff.new_version} ({removed_prefix})",
                }
            )
            continue

        fact = next((f for f in replacements if _under(a.target, f.target)), None)
        if fact is not None:
            new_target = _retarget(a.target, fact.target, fact.replacement)
            migrated.append(replace(a, target=new_target))
            report.needs_review.append(
                {
                    "target": new_target,
                    "original_target": a.target,
                    "reason": f"retargeted via deprecation of {fact.target}",
                }
            )
            continue

        fact = next((f for f in deprecations_without if _under(a.target, f.target)), None)
        if fact is not None:
            migrated.append(a)
            report.needs_review.append(
                {
                    "target": a.target,
                    "original_target": a.target,
                    "reason": f"target deprecated since {fact.since_version or 'an unknown version'}",
                }
            )
            continue

        owner = a.target.split(PARAM_SEP, 1)[0]
        change = changed_by_qname.get(owner)
        if change is not None:
            if PARAM_SEP in a.target:
                param_name = a.target.split(PARAM_SEP, 1)[1]
                if all(p.name != param_name for p in change.new_params):
                    report.dropped.append(
                        {
                            "target": a.target,
                            "kind": a.kind,
                            "reason": f"parameter vanished from {owner} in {diff.new_version}",
                        }
                    )
                    continue
            migrated.append(a)
            report.needs_review.append(
                {
                    "target": a.target,
                    "original_target": a.target,
                    "reason": f"signature of {owner} changed in {diff.new_version}",
                }
            )
            continue

        migrated.append(a)

    out = AnnotationSet.build(aset.library_name, diff.new_version, migrated)
    return out, report


def migration_to_json_dict(
    diff: ApiDiff,
    migrated: Optional[AnnotationSet] = None,
    report: Optional[ConflictReport] = None,
) -> dict:
    data = {
        "schema": SCHEMA_MIGRATION,
        "library": {
            "name": diff.library_name,
            "old_version": diff.old_version,
            "new_version": diff.new_version,
        },
        "diff": diff.to_json_dict(),
        "migration": None,
    }
    if migrated is not None and report is not None:
        data["migration"] = {
            "annotations": migrated.to_json_dict(),
            "conflicts": report.to_json_dict(),
        }
    return data
