"""Used/unused and useful/useless classification plus reduction statistics.

Definitions: a public class or callable is used when it has at least one
observed call; a public parameter is used when it was passed explicitly at
least once, and useful when its observed value set (explicit arguments plus
defaults of omitted occurrences) holds at least two distinct values.
Useless is the complement of useful.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .annotations import Annotation, AnnotationSet, KIND_MOVE, KIND_REMOVE, ORIGIN_AUTO
from .extractor import SurfaceCounts
from .miner import UsageCounts
from .model import ApiModel, DYNAMIC_TEXT, LiteralValue, PARAM_SEP

SCHEMA_CLASSIFICATION = "classification/1"
SCHEMA_STATS = "stats/1"

DEFAULT_KEEP_NAMES = frozenset({"fit_transform", "fit_predict"})
DEFAULT_SUFFIX_MAP = {"Classifier": "classification", "Regression": "regression"}


@dataclass(frozen=True)
class ClassUse:
    used: bool

    def to_json(self) -> dict:
        return {"used": self.used}


@dataclass(frozen=True)
class CallableUse:
    used: bool
    constructor: bool

    def to_json(self) -> dict:
        return {"used": self.used, "constructor": self.constructor}


@dataclass(frozen=True)
class ParamUse:
    used: bool
    useful: bool
    values: tuple[str, ...]  # distinct observed value texts, sorted
    explicit_count: int
    has_default: bool

    @property
    def useless(self) -> bool:
        return not self.useful

    def to_json(self) -> dict:
        return {
            "used": self.used,
            "useful": self.useful,
            "useless": self.useless,
            "values": list(self.values),
            "explicit_count": self.explicit_count,
            "has_default": self.has_default,
        }


@dataclass
class ClassificationReport:
    library_name: str
    library_version: str
    classes: dict[str, ClassUse] = field(default_factory=dict)
    callables: dict[str, CallableUse] = field(default_factory=dict)
    parameters: dict[str, ParamUse] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "schema": SCHEMA_CLASSIFICATION,
            "library": {"name": self.library_name, "version": self.library_version},
            "classes": {k: v.to_json() for k, v in self.classes.items()},
            "callables": {k: v.to_json() for k, v in self.callables.items()},
            "parameters": {k: v.to_json() for k, v in self.parameters.items()},
        }


def classify(
    model: ApiModel, counts: UsageCounts, counts_library: Optional[dict] = None
) -> ClassificationReport:
    """Classify every public element. Covers public elements only."""
    if counts_library is not None:
        expected = {"name": model.library_name, "version": model.library_version}
        if dict(counts_library) != expected:
            raise ValueError(
                f"usage data was mined against {counts_library}, model is {expected}"
            )

    report = ClassificationReport(model.library_name, model.library_version)
    for cls in model.iter_classes():
        text = cls.qname.render()
        if not model.is_public(text):
            continue
        entry = counts.classes.get(text)
        report.classes[text] = ClassUse(used=bool(entry and entry["count"] >= 1))
    for fn in model.iter_callables():
        text = fn.qname.render()
        if not model.is_public(text):
            continue
        entry = counts.callables.get(text)
        report.callables[text] = CallableUse(
            used=bool(entry and entry["count"] >= 1), constructor=fn.is_constructor
        )
    for text, _owner, param in model.iter_parameters():
        if not model.is_public(text):
            continue
        entry = counts.parameters.get(text)
        values = tuple(sorted(entry["values"])) if entry else ()
        explicit = entry["explicit_count"] if entry else 0
        report.parameters[text] = ParamUse(
            used=explicit >= 1,
            useful=len(values) >= 2,
            values=values,
            explicit_count=explicit,
            has_default=param.default is not None,
        )
    return report


# ---------------------------------------------------------------------------
# Reduction statistics
# ---------------------------------------------------------------------------


def percent_half_up(reduction: int, public: int) -> int:
    """round(100 * reduction / public) with exact half-up tie breaking."""
    if public <= 0:
        return 0
    return (200 * reduction + public) // (2 * public)


@dataclass(frozen=True)
class KindStats:
    kind: str
    total: int
    public: int
    used: Optional[int]  # classes and functions keep what is used
    useful: Optional[int]  # parameters keep what is useful

    @property
    def kept(self) -> int:
        return self.useful if self.useful is not None else (self.used or 0)

    @property
    def kept_label(self) -> str:
        return "useful" if self.useful is not None else "used"

    @property
    def reduction(self) -> int:
        return self.public - self.kept

    @property
    def reduction_percent(self) -> int:
        return percent_half_up(self.reduction, self.public)

    def to_json(self) -> dict:
        data = {"total": self.total, "public": self.public}
        if self.used is not None:
            data["used"] = self.used
        if self.useful is not None:
            data["useful"] = self.useful
        data["reduction"] = self.reduction
        data["reduction_percent"] = self.reduction_percent
        return data


@dataclass(frozen=True)
class StatsSummary:
    library_name: str
    library_version: str
    classes: KindStats
    functions: KindStats
    parameters: KindStats
    notes: tuple[str, ...] = ()

    @staticmethod
    def from_counts(
        library_name: str,
        library_version: str,
        classes: tuple[int, int, int],
        functions: tuple[int, int, int],
        parameters: tuple[int, int, int],
    ) -> "StatsSummary":
        """(total, public, kept) triples; kept means used, or useful for parameters."""
        notes = []
        kinds = {}
        for kind, triple in (
            ("classes", classes),
            ("functions", functions),
            ("parameters", parameters),
        ):
            total, public, kept = triple
            if kind == "parameters":
                kinds[kind] = KindStats(kind, total, public, used=None, useful=kept)
            else:
                kinds[kind] = KindStats(kind, total, public, used=kept, useful=None)
            if public == 0:
                notes.append(f"{kind}: no public elements; reduction percentage degenerate")
        return StatsSummary(
            library_name=library_name,
            library_version=library_version,
            classes=kinds["classes"],
            functions=kinds["functions"],
            parameters=kinds["parameters"],
            notes=tuple(notes),
        )

    def to_json_dict(self) -> dict:
        return {
            "schema": SCHEMA_STATS,
            "library": {"name": self.library_name, "version": self.library_version},
            "classes": self.classes.to_json(),
            "functions": self.functions.to_json(),
            "parameters": self.parameters.to_json(),
            "notes": list(self.notes),
        }

    def to_markdown(self) -> str:
        lines = [
            f"# API reduction for {self.library_name} {self.library_version}",
            "",
            "| Kind | Total | Public | Used | Useful | Removed | Reduction |",
            "| --- | ---: | ---: | ---: | ---: | ---: | ---: |",
        ]
        for stats in (self.classes, self.functions, self.parameters):
            used = "-" if stats.used is None else str(stats.used)
            useful = "-" if stats.useful is None else str(stats.useful)
            lines.append(
                f"| {stats.kind} | {stats.total} | {stats.public} | {used} | {useful} "
                f"| {stats.reduction} | {stats.reduction_percent}% |"
            )
        for note in self.notes:
            lines.append("")
            lines.append(f"Note: {note}")
        return "\n".join(lines) + "\n"


def reduction_stats(report: ClassificationReport, surface: SurfaceCounts) -> StatsSummary:
    classes_used = sum(1 for c in report.classes.values() if c.used)
    functions_used = sum(1 for c in report.callables.values() if c.used)
    params_used = sum(1 for p in report.parameters.values() if p.used)
    params_useful = sum(1 for p in report.parameters.values() if p.useful)
    summary = StatsSummary.from_counts(
        report.library_name,
        report.library_version,
        classes=(surface.classes_total, surface.classes_public, classes_used),
        functions=(surface.functions_total, surface.functions_public, functions_used),
        parameters=(surface.params_total, surface.params_public, params_useful),
    )
    parameters = KindStats(
        "parameters",
        surface.params_total,
        surface.params_public,
        used=params_used,
        useful=params_useful,
    )
    return StatsSummary(
        library_name=summary.library_name,
        library_version=summary.library_version,
        classes=summary.classes,
        functions=summary.functions,
        parameters=parameters,
        notes=summary.notes,
    )


# ---------------------------------------------------------------------------
# Auto-suggested annotations
# ---------------------------------------------------------------------------


def _bakeable_value(values: tuple[str, ...]) -> Optional[LiteralValue]:
    if len(values) != 1 or values[0] == DYNAMIC_TEXT:
        return None
    literal = LiteralValue.from_text(values[0])
    if literal.tag == "opaque_literal":
        return None
    return literal


def suggest_removals(
    report: ClassificationReport, keep_names: frozenset[str] = DEFAULT_KEEP_NAMES
) -> AnnotationSet:
    """Auto @remove for unused classes/functions and useless parameters.

    Constructors are skipped (removing the class covers them), as are
    functions on the keep-list. A useless required parameter is only
    suggested when a literal single value can be baked in or its owner is
    being removed too; otherwise the wrapper could not forward a value.
    """
    suggestions: list[Annotation] = []
    removed_owners: set[str] = set()

    for text, cls in report.classes.items():
        if not cls.used:
            suggestions.append(Annotation(target=text, kind=KIND_REMOVE, origin=ORIGIN_AUTO))
            removed_owners.add(text)
    for text, fn in report.callables.items():
        if fn.used or fn.constructor:
            continue
        if text.rsplit(".", 1)[-1] in keep_names:
            continue
        suggestions.append(Annotation(target=text, kind=KIND_REMOVE, origin=ORIGIN_AUTO))
        removed_owners.add(text)

    for text, param in report.parameters.items():
        if param.useful:
            continue
        owner, _, _ = text.partition(PARAM_SEP)
        owner_class = owner[: -len(".__init__")] if owner.endswith(".__init__") else None
        owner_removed = owner in removed_owners or owner_class in removed_owners
        baked = _bakeable_value(param.values)
        if not param.has_default and baked is None and not owner_removed:
            continue
        suggestions.append(
            Annotation(target=text, kind=KIND_REMOVE, origin=ORIGIN_AUTO, baked_value=baked)
        )

    return AnnotationSet.build(report.library_name, report.library_version, suggestions)


def suggest_moves(
    model: ApiModel, suffix_map: Optional[dict[str, str]] = None
) -> AnnotationSet:
    """Auto @move for public classes whose name suffix maps to a task module."""
    mapping = dict(DEFAULT_SUFFIX_MAP if suffix_map is None else suffix_map)
    suffixes = sorted(mapping, key=len, reverse=True)
    suggestions = []
    for cls in model.iter_classes():
        text = cls.qname.render()
        if not model.is_public(text):
            continue
        name = cls.name
        for suffix in suffixes:
            if not name.endswith(suffix) or name == suffix:
                continue
            destination = f"{model.library_name}.{mapping[suffix]}"
            home = ".".join(cls.qname.segments[:-1])
            if home != destination:
                suggestions.append(
                    Annotation(
                        target=text,
                        kind=KIND_MOVE,
                        origin=ORIGIN_AUTO,
                        destination_module=destination,
                    )
                )
            break
    return AnnotationSet.build(model.library_name, model.library_version, suggestions)
