"""The five API-adaptation directives: definition, validation, persistence, merge.

An annotation attaches to one API element by qualified-name text and tells
the generator how to adapt it: drop it (remove), turn a constructor
parameter into a settable attribute (attribute), fold dependent parameters
into a parameter-object (group), close a string parameter over an enum
(enum), or relocate it (move).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Optional

from .jsonutil import SCHEMA_ANNOTATIONS
from .model import (
    ApiModel,
    Callable,
    ClassInfo,
    LiteralValue,
    ModuleInfo,
    PARAM_SEP,
    POSITIONAL_ONLY,
    Parameter,
    is_identifier,
)

KIND_REMOVE = "remove"
KIND_ATTRIBUTE = "attribute"
KIND_GROUP = "group"
KIND_ENUM = "enum"
KIND_MOVE = "move"
ANNOTATION_KINDS = (KIND_REMOVE, KIND_ATTRIBUTE, KIND_GROUP, KIND_ENUM, KIND_MOVE)

ORIGIN_AUTO = "auto"
ORIGIN_MANUAL = "manual"

_UPPER_SNAKE_RE = re.compile(r"^[A-Z][A-Z0-9_]*$")

# Values that can be baked into generated code as source text.
_PLAIN_LITERAL_TAGS = frozenset({"none", "bool", "int", "float", "string"})


@dataclass(frozen=True)
class GroupVariant:
    variant_name: str
    discriminator_value: str
    member_params: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "variant_name": self.variant_name,
            "discriminator_value": self.discriminator_value,
            "member_params": list(self.member_params),
        }

    @staticmethod
    def from_json(data: dict) -> "GroupVariant":
        return GroupVariant(
            variant_name=data["variant_name"],
            discriminator_value=data["discriminator_value"],
            member_params=tuple(data.get("member_params", ())),
        )


@dataclass(frozen=True)
class GroupSpec:
    group_name: str
    discriminator_param: str
    variants: tuple[GroupVariant, ...]

    def claimed_params(self) -> tuple[str, ...]:
        names = [self.discriminator_param]
        for variant in self.variants:
            names.extend(variant.member_params)
        return tuple(names)

    def to_json(self) -> dict:
        return {
            "group_name": self.group_name,
            "discriminator_param": self.discriminator_param,
            "variants": [v.to_json() for v in self.variants],
        }

    @staticmethod
    def from_json(data: dict) -> "GroupSpec":
        return GroupSpec(
            group_name=data["group_name"],
            discriminator_param=data["discriminator_param"],
            variants=tuple(GroupVariant.from_json(v) for v in data["variants"]),
        )


@dataclass(frozen=True)
class EnumMember:
    member_name: str
    string_value: str

    def to_json(self) -> dict:
        return {"member_name": self.member_name, "string_value": self.string_value}

    @staticmethod
    def from_json(data: dict) -> "EnumMember":
        return EnumMember(member_name=data["member_name"], string_value=data["string_value"])


@dataclass(frozen=True)
class EnumSpec:
    enum_name: str
    members: tuple[EnumMember, ...]

    def to_json(self) -> dict:
        return {"enum_name": self.enum_name, "members": [m.to_json() for m in self.members]}

    @staticmethod
    def from_json(data: dict) -> "EnumSpec":
        return EnumSpec(
            enum_name=data["enum_name"],
            members=tuple(EnumMember.from_json(m) for m in data["members"]),
        )


@dataclass(frozen=True)
class Annotation:
    target: str
    kind: str
    origin: str = ORIGIN_MANUAL
    baked_value: Optional[LiteralValue] = None
    default_override: Optional[LiteralValue] = None
    group: Optional[GroupSpec] = None
    enum: Optional[EnumSpec] = None
    destination_module: Optional[str] = None

    def sort_key(self) -> tuple[str, str]:
        return (self.target, self.kind)

    def to_json(self) -> dict:
        doc: dict = {"target": self.target, "kind": self.kind, "origin": self.origin}
        if self.baked_value is not None:
            doc["baked_value"] = self.baked_value.to_json()
        if self.default_override is not None:
            doc["default_override"] = self.default_override.to_json()
        if self.group is not None:
            doc["group"] = self.group.to_json()
        if self.enum is not None:
            doc["enum"] = self.enum.to_json()
        if self.destination_module is not None:
            doc["destination_module"] = self.destination_module
        return doc

    @staticmethod
    def from_json(data: dict) -> "Annotation":
        baked = data.get("baked_value")
        override = data.get("default_override")
        group = data.get("group")
        enum = data.get("enum")
        return Annotation(
            target=data["target"],
            kind=data["kind"],
            origin=data.get("origin", ORIGIN_MANUAL),
            baked_value=LiteralValue.from_json(baked) if baked else None,
            default_override=LiteralValue.from_json(override) if override else None,
            group=GroupSpec.from_json(group) if group else None,
            enum=EnumSpec.from_json(enum) if enum else None,
            destination_module=data.get("destination_module"),
        )


@dataclass(frozen=True)
class AnnotationSet:
    library_name: str
    library_version: str
    annotations: tuple[Annotation, ...] = ()

    @staticmethod
    def build(library_name: str, library_version: str, annotations) -> "AnnotationSet":
        return AnnotationSet(
            library_name=library_name,
            library_version=library_version,
            annotations=tuple(sorted(annotations, key=Annotation.sort_key)),
        )

    @staticmethod
    def empty(library_name: str, library_version: str) -> "AnnotationSet":
        return AnnotationSet.build(library_name, library_version, ())

    def by_target(self, target: str) -> tuple[Annotation, ...]:
        return tuple(a for a in self.annotations if a.target == target)

    def of_kind(self, kind: str) -> tuple[Annotation, ...]:
        return tuple(a for a in self.annotations if a.kind == kind)

    def to_json_dict(self) -> dict:
        return {
            "schema": SCHEMA_ANNOTATIONS,
            "library": {"name": self.library_name, "version": self.library_version},
            "annotations": [a.to_json() for a in self.annotations],
        }

    @staticmethod
    def from_json_dict(data: dict) -> "AnnotationSet":
        if data.get("schema") != SCHEMA_ANNOTATIONS:
            raise ValueError(f"expected schema {SCHEMA_ANNOTATIONS}, got {data.get('schema')!r}")
        return AnnotationSet.build(
            data["library"]["name"],
            data["library"]["version"],
            (Annotation.from_json(a) for a in data["annotations"]),
        )


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" or "warning"
    target: str
    message: str

    def to_json(self) -> dict:
        return {"severity": self.severity, "target": self.target, "message": self.message}


@dataclass
class ValidationResult:
    errors: list[Diagnostic] = field(default_factory=list)
    warnings: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def error(self, target: str, message: str) -> None:
        self.errors.append(Diagnostic("error", target, message))

    def warn(self, target: str, message: str) -> None:
        self.warnings.append(Diagnostic("warning", target, message))

    def to_json_dict(self) -> dict:
        return {
            "errors": [d.to_json() for d in self.errors],
            "warnings": [d.to_json() for d in self.warnings],
        }


def _owner_texts(target: str) -> tuple[Optional[str], Optional[str]]:
    """(owning callable text, owning class text for constructor params)."""
    if PARAM_SEP not in target:
        return None, None
    owner, _, _ = target.partition(PARAM_SEP)
    if owner.endswith(".__init__"):
        return owner, owner[: -len(".__init__")]
    return owner, None


def _validate_group(a: Annotation, element: Callable, result: ValidationResult) -> None:
    spec = a.group
    if spec is None:
        result.error(a.target, "group annotation carries no group payload")
        return
    if not is_identifier(spec.group_name):
        result.error(a.target, f"group_name is not an identifier: {spec.group_name!r}")
    param_names = {p.name: p for p in element.parameters}
    discriminator = param_names.get(spec.discriminator_param)
    if discriminator is None:
        result.error(a.target, f"discriminator {spec.discriminator_param!r} is not a parameter")
    elif discriminator.is_variadic or discriminator.assignment_kind == POSITIONAL_ONLY:
        result.error(a.target, f"discriminator {spec.discriminator_param!r} cannot be grouped")
    if not spec.variants:
        result.error(a.target, "group needs at least one variant")
    seen_variant_names: set[str] = set()
    seen_values: set[str] = set()
    seen_members: set[str] = set()
    for variant in spec.variants:
        if not is_identifier(variant.variant_name):
            result.error(a.target, f"variant name is not an identifier: {variant.variant_name!r}")
        if variant.variant_name in seen_variant_names:
            result.error(a.target, f"duplicate variant name: {variant.variant_name!r}")
        seen_variant_names.add(variant.variant_name)
        if variant.discriminator_value in seen_values:
            result.error(a.target, f"duplicate discriminator value: {variant.discriminator_value!r}")
        seen_values.add(variant.discriminator_value)
        for member in variant.member_params:
            if member == spec.discriminator_param:
                result.error(a.target, f"variant member {member!r} is the discriminator")
                continue
            if member in seen_members:
                result.error(a.target, f"member {member!r} appears in more than one variant")
            seen_members.add(member)
            param = param_names.get(member)
            if param is None:
                result.error(a.target, f"member {member!r} is not a parameter")
            elif param.is_variadic or param.assignment_kind == POSITIONAL_ONLY:
                result.error(a.target, f"member {member!r} cannot be grouped")


def _validate_enum(a: Annotation, param: Parameter, result: ValidationResult) -> None:
    spec = a.enum
    if spec is None:
        result.error(a.target, "enum annotation carries no enum payload")
        return
    if not is_identifier(spec.enum_name):
        result.error(a.target, f"enum_name is not an identifier: {spec.enum_name!r}")
    if not spec.members:
        result.error(a.target, "enum needs at least one member")
    seen_names: set[str] = set()
    seen_values: set[str] = set()
    for member in spec.members:
        if not _UPPER_SNAKE_RE.match(member.member_name):
            result.error(a.target, f"member name not UPPER_SNAKE: {member.member_name!r}")
        if member.member_name in seen_names:
            result.error(a.target, f"duplicate enum member name: {member.member_name!r}")
        seen_names.add(member.member_name)
        if not isinstance(member.string_value, str):
            result.error(a.target, f"enum value must be a string: {member.string_value!r}")
            continue
        if member.string_value in seen_values:
            result.error(a.target, f"duplicate enum value: {member.string_value!r}")
        seen_values.add(member.string_value)
    if param.default is not None and param.default.tag not in ("string", "none", "opaque_literal"):
        result.warn(a.target, "enum target's default is not a string")


def validate(
    aset: AnnotationSet, model: ApiModel, report: Optional["object"] = None
) -> ValidationResult:
    """Check one annotation set against a model.

    `report` is an optional ClassificationReport; when given, removals of
    elements with observed uses draw a warning.
    """
    result = ValidationResult()

    removed_targets = {a.target for a in aset.annotations if a.kind == KIND_REMOVE}

    for a in aset.annotations:
        if a.kind not in ANNOTATION_KINDS:
            result.error(a.target, f"unknown annotation kind: {a.kind!r}")
            continue
        if a.origin not in (ORIGIN_AUTO, ORIGIN_MANUAL):
            result.error(a.target, f"unknown origin: {a.origin!r}")
        element = model.lookup(a.target) if model.defines(a.target) else None
        if element is None:
            resolved = model.resolve_text(a.target)
            if resolved is not None:
                result.error(a.target, f"target is an alias; use the defining name {resolved[0]}")
            else:
                result.error(a.target, "unknown target")
            continue

        try:
            if not model.is_public(a.target):
                result.warn(a.target, "annotation on an internal element")
        except KeyError:
            pass

        if a.baked_value is not None and not (
            a.kind == KIND_REMOVE and isinstance(element, Parameter)
        ):
            result.error(a.target, "baked_value is only valid for remove on a parameter")
        if a.baked_value is not None and a.baked_value.tag not in _PLAIN_LITERAL_TAGS:
            result.error(
                a.target, f"baked_value must be a plain literal, got {a.baked_value.tag}"
            )
        if a.default_override is not None:
            if a.kind != KIND_ATTRIBUTE:
                result.error(a.target, "default_override is only valid for attribute")
            elif a.default_override.tag not in _PLAIN_LITERAL_TAGS:
                result.error(
                    a.target,
                    f"default_override must be a plain literal, got {a.default_override.tag}",
                )

        if a.kind == KIND_REMOVE:
            if isinstance(element, Parameter):
                if element.is_variadic and a.baked_value is not None:
                    result.error(a.target, "variadic parameters cannot bake a value")
                if (
                    element.default is None
                    and not element.is_variadic
                    and a.baked_value is None
                ):
                    owner, owner_class = _owner_texts(a.target)
                    if owner not in removed_targets and owner_class not in removed_targets:
                        result.error(
                            a.target,
                            "removing a required parameter needs a baked_value",
                        )
            if report is not None and isinstance(element, (ClassInfo, Callable)):
                used = _element_used(report, a.target, element)
                if used:
                    result.warn(a.target, "removing an element with observed uses")
        elif a.kind == KIND_ATTRIBUTE:
            owner, owner_class = _owner_texts(a.target)
            owner_element = model.lookup(owner) if owner else None
            if not (
                isinstance(element, Parameter)
                and isinstance(owner_element, Callable)
                and owner_element.is_constructor
            ):
                result.error(a.target, "attribute annotations target constructor parameters")
            else:
                if element.is_variadic:
                    result.error(a.target, "variadic parameters cannot become attributes")
                if element.assignment_kind == POSITIONAL_ONLY:
                    result.error(
                        a.target, "positional-only parameters cannot become attributes"
                    )
                cls = model.lookup(owner_class) if owner_class else None
                if isinstance(cls, ClassInfo) and not any(
                    not m.is_constructor for m in cls.methods
                ):
                    result.warn(
                        a.target,
                        "class has no methods; attribute values can never be applied",
                    )
        elif a.kind == KIND_GROUP:
            if not isinstance(element, Callable):
                result.error(a.target, "group annotations target callables")
            else:
                _validate_group(a, element, result)
        elif a.kind == KIND_ENUM:
            if not isinstance(element, Parameter):
                result.error(a.target, "enum annotations target parameters")
            elif element.is_variadic:
                result.error(a.target, "variadic parameters cannot be enums")
            elif element.assignment_kind == POSITIONAL_ONLY:
                result.error(a.target, "positional-only parameters cannot be enums")
            else:
                _validate_enum(a, element, result)
        elif a.kind == KIND_MOVE:
            movable = isinstance(element, ClassInfo) or (
                isinstance(element, Callable) and model.class_of(a.target) is None
            )
            if not movable:
                result.error(a.target, "move annotations target classes or module-level functions")
            elif a.destination_module is None:
                result.error(a.target, "move annotation carries no destination_module")
            else:
                dest = a.destination_module
                segments = dest.split(".")
                if not all(is_identifier(s) for s in segments):
                    result.error(a.target, f"destination is not a module path: {dest!r}")
                elif segments[0] != model.library_name:
                    result.error(
                        a.target, f"destination must be inside {model.library_name}: {dest!r}"
                    )
                else:
                    existing = model.lookup(dest)
                    if existing is not None and not isinstance(existing, ModuleInfo):
                        result.error(a.target, f"destination collides with {dest}")
                    landing = f"{dest}.{a.target.rsplit('.', 1)[-1]}"
                    if model.defines(landing) and landing != a.target:
                        result.error(a.target, f"destination already defines {landing}")

    _validate_set_rules(aset, result)
    return result


def _element_used(report, target: str, element) -> bool:
    if isinstance(element, ClassInfo):
        entry = report.classes.get(target)
        return bool(entry and entry.used)
    entry = report.callables.get(target)
    return bool(entry and entry.used)


def _validate_set_rules(aset: AnnotationSet, result: ValidationResult) -> None:
    move_seen: set[str] = set()
    other_seen: set[str] = set()
    for a in aset.annotations:
        slot = move_seen if a.kind == KIND_MOVE else other_seen
        if a.target in slot:
            result.error(a.target, "conflicting annotations on the same target")
        slot.add(a.target)

    claims: dict[str, str] = {}  # param text -> group target
    for a in aset.annotations:
        if a.kind == KIND_GROUP and a.group is not None:
            for name in a.group.claimed_params():
                claims[a.target + PARAM_SEP + name] = a.target
    for a in aset.annotations:
        if a.kind != KIND_GROUP and a.target in claims:
            result.error(
                a.target,
                f"parameter is claimed by the group on {claims[a.target]}",
            )


# ---------------------------------------------------------------------------
# Merge
# ---------------------------------------------------------------------------


def merge(auto: AnnotationSet, manual: AnnotationSet) -> tuple[AnnotationSet, list[Diagnostic]]:
    """Union with manual precedence on collisions; group claims propagate.

    A manual group claims its discriminator and member parameters, dropping
    auto annotations on them; a manual annotation on a parameter likewise
    drops an auto group that claims it.
    """
    if (auto.library_name, auto.library_version) != (manual.library_name, manual.library_version):
        raise ValueError(
            f"annotation sets disagree on library: {auto.library_name} {auto.library_version}"
            f" vs {manual.library_name} {manual.library_version}"
        )
    warnings: list[Diagnostic] = []

    manual_slots = {(a.target, a.kind == KIND_MOVE) for a in manual.annotations}
    manual_claimed = {
        a.target + PARAM_SEP + name
        for a in manual.annotations
        if a.kind == KIND_GROUP and a.group is not None
        for name in a.group.claimed_params()
    }
    manual_param_targets = {a.target for a in manual.annotations if PARAM_SEP in a.target}

    kept: list[Annotation] = list(manual.annotations)
    for a in auto.annotations:
        if (a.target, a.kind == KIND_MOVE) in manual_slots:
            warnings.append(
                Diagnostic("warning", a.target, f"auto {a.kind} superseded by manual annotation")
            )
            continue
        if a.target in manual_claimed:
            warnings.append(
                Diagnostic("warning", a.target, "auto annotation dropped: parameter is grouped manually")
            )
            continue
        if a.kind == KIND_GROUP and a.group is not None:
            claimed = {a.target + PARAM_SEP + n for n in a.group.claimed_params()}
            if claimed & manual_param_targets:
                warnings.append(
                    Diagnostic(
                        "warning",
                        a.target,
                        "auto group dropped: a grouped parameter carries a manual annotation",
                    )
                )
                continue
        kept.append(a)

    merged = AnnotationSet.build(auto.library_name, auto.library_version, kept)
    return merged, warnings


def accept_suggestion(aset: AnnotationSet, target: str, kind: str) -> AnnotationSet:
    """Flip one auto annotation to manual origin (editor 'accept' semantics)."""
    out = []
    for a in aset.annotations:
        if a.target == target and a.kind == kind and a.origin == ORIGIN_AUTO:
            out.append(replace(a, origin=ORIGIN_MANUAL))
        else:
            out.append(a)
    return AnnotationSet.build(aset.library_name, aset.library_version, out)
