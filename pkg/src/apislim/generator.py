"""Infer the adapted API from model + annotations and render wrapper sources.

Wrapper classes hold their constructor arguments and build the wrapped
object at the first forwarded method call, so attribute-annotated fields
assigned beforehand reach the underlying constructor. A class with no
forwardable methods constructs immediately, since nothing could ever
trigger the deferred call.

Optional adapted parameters default to the UNSET sentinel and are only
forwarded when given, so the kwargs received by the wrapped library are
exactly those of the corresponding direct call.
"""

from __future__ import annotations

import hashlib
import keyword
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import __version__ as _tool_version
from .annotations import (
    Annotation,
    AnnotationSet,
    EnumSpec,
    GroupSpec,
    KIND_ATTRIBUTE,
    KIND_ENUM,
    KIND_GROUP,
    KIND_MOVE,
    KIND_REMOVE,
    validate,
)
from .jsonutil import SCHEMA_GENERATED, canonical_json
from .model import (
    ApiModel,
    Callable,
    ClassInfo,
    KEYWORD_ONLY,
    LiteralValue,
    PARAM_SEP,
    POSITIONAL_ONLY,
    POSITIONAL_OR_KEYWORD,
    Parameter,
    VAR_KEYWORD,
    VAR_POSITIONAL,
)

_RESERVED_WRAPPER_NAMES = frozenset({"_obj", "_kwargs", "_pos", "_instance"})


class GenerationError(ValueError):
    """Raised when annotations cannot be turned into a coherent wrapper."""


# ---------------------------------------------------------------------------
# Adapted model
# ---------------------------------------------------------------------------

MODE_KEEP = "keep"
MODE_ENUM = "enum"
MODE_GROUP = "group"


@dataclass(frozen=True)
class AdaptedParam:
    source: Parameter
    mode: str = MODE_KEEP
    enum: Optional[EnumSpec] = None
    group: Optional[GroupSpec] = None

    @property
    def name(self) -> str:
        return self.source.name

    @property
    def required(self) -> bool:
        return self.source.default is None and not self.source.is_variadic

    @property
    def hint(self) -> Optional[str]:
        if self.mode == MODE_ENUM:
            return self.enum.enum_name
        if self.mode == MODE_GROUP:
            return self.group.group_name
        return self.source.type_hint_text


@dataclass(frozen=True)
class BakedArg:
    source: Parameter
    value_text: str  # literal Python expression


@dataclass(frozen=True)
class AttributeField:
    source: Parameter
    initial_text: Optional[str]  # None renders as UNSET


@dataclass(frozen=True)
class AdaptedCallable:
    source: Callable
    params: tuple[AdaptedParam, ...]
    baked: tuple[BakedArg, ...] = ()
    applied: tuple[str, ...] = ()  # annotation kinds that shaped this signature


@dataclass(frozen=True)
class AdaptedClass:
    source: ClassInfo
    source_module: str
    constructor: Optional[AdaptedCallable]
    methods: tuple[AdaptedCallable, ...]
    attributes: tuple[AttributeField, ...] = ()

    @property
    def name(self) -> str:
        return self.source.name

    @property
    def eager(self) -> bool:
        return not self.methods


@dataclass(frozen=True)
class AdaptedFunction:
    source_module: str
    adapted: AdaptedCallable

    @property
    def name(self) -> str:
        return self.adapted.source.qname.name


@dataclass(frozen=True)
class GeneratedEnum:
    spec: EnumSpec
    source_param: str  # provenance: parameter qname text


@dataclass(frozen=True)
class GeneratedGroup:
    spec: GroupSpec
    source_callable: Callable


@dataclass(frozen=True)
class AdaptedModule:
    qname: str  # original module path; rendered path strips the library root
    classes: tuple[AdaptedClass, ...] = ()
    functions: tuple[AdaptedFunction, ...] = ()
    enums: tuple[GeneratedEnum, ...] = ()
    groups: tuple[GeneratedGroup, ...] = ()
    reexports: tuple[tuple[str, str], ...] = ()  # (alias name, original defining text)


@dataclass(frozen=True)
class AdaptedApiModel:
    library_name: str
    library_version: str
    modules: tuple[AdaptedModule, ...]
    api_hash: str
    annotations_hash: str
    homes: dict[str, str] = field(default_factory=dict)  # defining text -> adapted module


# ---------------------------------------------------------------------------
# Inference
# ---------------------------------------------------------------------------


def _input_hash(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()[:12]


def _is_removed(text: str, removed: set[str]) -> bool:
    if text in removed:
        return True
    for r in removed:
        if text.startswith(r + ".") or text.startswith(r + PARAM_SEP):
            return True
    return False


@dataclass
class _CallableAnnotations:
    removed: dict[str, Annotation]
    attributes: dict[str, Annotation]
    enums: dict[str, Annotation]
    group: Optional[Annotation]


def _annotations_for_callable(c: Callable, aset: AnnotationSet) -> _CallableAnnotations:
    base = c.qname.render() + PARAM_SEP
    removed: dict[str, Annotation] = {}
    attributes: dict[str, Annotation] = {}
    enums: dict[str, Annotation] = {}
    group: Optional[Annotation] = None
    for a in aset.annotations:
        if a.kind == KIND_GROUP and a.target == c.qname.render():
            group = a
        elif a.target.startswith(base):
            name = a.target[len(base):]
            if a.kind == KIND_REMOVE:
                removed[name] = a
            elif a.kind == KIND_ATTRIBUTE:
                attributes[name] = a
            elif a.kind == KIND_ENUM:
                enums[name] = a
    return _CallableAnnotations(removed, attributes, enums, group)


def _adapt_callable(
    c: Callable, aset: AnnotationSet
) -> tuple[AdaptedCallable, tuple[AttributeField, ...], list[GeneratedEnum], list[GeneratedGroup]]:
    notes = _annotations_for_callable(c, aset)
    applied: list[str] = []
    params: list[AdaptedParam] = []
    baked: list[BakedArg] = []
    attributes: list[AttributeField] = []
    enums: list[GeneratedEnum] = []
    groups: list[GeneratedGroup] = []

    grouped_members: set[str] = set()
    discriminator: Optional[str] = None
    if notes.group is not None:
        spec = notes.group.group
        discriminator = spec.discriminator_param
        grouped_members = set(spec.claimed_params()) - {discriminator}
        applied.append(KIND_GROUP)
        has_var_pos = any(p.assignment_kind == VAR_POSITIONAL for p in c.parameters)
        if has_var_pos:
            disc_param = c.parameter(discriminator)
            if disc_param is not None and disc_param.assignment_kind == POSITIONAL_OR_KEYWORD:
                raise GenerationError(
                    f"group discriminator {discriminator!r} cannot precede *args in "
                    f"{c.qname.render()}"
                )
        groups.append(GeneratedGroup(spec=spec, source_callable=c))

    for p in c.parameters:
        if p.name in notes.removed:
            a = notes.removed[p.name]
            applied.append(KIND_REMOVE)
            if a.baked_value is not None:
                baked.append(BakedArg(source=p, value_text=a.baked_value.text))
            continue
        if p.name in notes.attributes:
            a = notes.attributes[p.name]
            applied.append(KIND_ATTRIBUTE)
            initial = a.default_override.text if a.default_override is not None else None
            attributes.append(AttributeField(source=p, initial_text=initial))
            continue
        if p.name in grouped_members:
            continue
        if p.name == discriminator:
            params.append(AdaptedParam(source=p, mode=MODE_GROUP, group=notes.group.group))
            continue
        if p.name in notes.enums:
            a = notes.enums[p.name]
            applied.append(KIND_ENUM)
            params.append(AdaptedParam(source=p, mode=MODE_ENUM, enum=a.enum))
            enums.append(
                GeneratedEnum(spec=a.enum, source_param=c.qname.render() + PARAM_SEP + p.name)
            )
            continue
        params.append(AdaptedParam(source=p))

    adapted = AdaptedCallable(
        source=c, params=tuple(params), baked=tuple(baked), applied=tuple(applied)
    )
    return adapted, tuple(attributes), enums, groups


def infer_adapted_api(model: ApiModel, aset: AnnotationSet) -> AdaptedApiModel:
    """Apply annotation transform semantics to the public API surface."""
    result = validate(aset, model)
    if not result.ok:
        details = "; ".join(f"{d.target}: {d.message}" for d in result.errors)
        raise GenerationError(f"annotations do not validate: {details}")

    removed = {a.target for a in aset.annotations if a.kind == KIND_REMOVE}
    moves = {
        a.target: a.destination_module for a in aset.annotations if a.kind == KIND_MOVE
    }

    modules: dict[str, dict] = {}
    homes: dict[str, str] = {}

    def module_bucket(qname: str) -> dict:
        return modules.setdefault(
            qname, {"classes": [], "functions": [], "enums": [], "groups": [], "reexports": []}
        )

    for mod in model.modules:
        mod_text = mod.qname.render()
        if _is_removed(mod_text, removed):
            continue
        module_bucket(mod_text)

        for cls in mod.classes:
            cls_text = cls.qname.render()
            if _is_removed(cls_text, removed) or not model.is_public(cls_text):
                continue
            home = moves.get(cls_text, mod_text)
            bucket = module_bucket(home)
            ctor = None
            attributes: tuple[AttributeField, ...] = ()
            methods: list[AdaptedCallable] = []
            for m in cls.methods:
                m_text = m.qname.render()
                if _is_removed(m_text, removed) or not model.is_public(m_text):
                    continue
                adapted, attrs, enums, groups = _adapt_callable(m, aset)
                bucket["enums"].extend(enums)
                bucket["groups"].extend(groups)
                if m.is_constructor:
                    ctor = adapted
                    attributes = attrs
                else:
                    methods.append(adapted)
            methods.sort(key=lambda m: m.source.qname.name)
            bucket["classes"].append(
                AdaptedClass(
                    source=cls,
                    source_module=mod_text,
                    constructor=ctor,
                    methods=tuple(methods),
                    attributes=attributes,
                )
            )
            homes[cls_text] = home

        for fn in mod.functions:
            fn_text = fn.qname.render()
            if _is_removed(fn_text, removed) or not model.is_public(fn_text):
                continue
            home = moves.get(fn_text, mod_text)
            bucket = module_bucket(home)
            adapted, _attrs, enums, groups = _adapt_callable(fn, aset)
            bucket["enums"].extend(enums)
            bucket["groups"].extend(groups)
            bucket["functions"].append(AdaptedFunction(source_module=mod_text, adapted=adapted))
            homes[fn_text] = home

    for mod in model.modules:
        mod_text = mod.qname.render()
        if mod_text not in modules:
            continue
        for alias, target in mod.reexports:
            if _is_removed(target, removed) or target not in homes:
                continue
            modules[mod_text]["reexports"].append((alias.rsplit(".", 1)[-1], target))

    adapted_modules = []
    for qname in sorted(modules):
        bucket = modules[qname]
        _check_collisions(qname, bucket)
        adapted_modules.append(
            AdaptedModule(
                qname=qname,
                classes=tuple(sorted(bucket["classes"], key=lambda c: c.name)),
                functions=tuple(sorted(bucket["functions"], key=lambda f: f.name)),
                enums=tuple(sorted(bucket["enums"], key=lambda e: e.spec.enum_name)),
                groups=tuple(sorted(bucket["groups"], key=lambda g: g.spec.group_name)),
                reexports=tuple(sorted(bucket["reexports"])),
            )
        )

    return AdaptedApiModel(
        library_name=model.library_name,
        library_version=model.library_version,
        modules=tuple(adapted_modules),
        api_hash=_input_hash(model.to_bytes()),
        annotations_hash=_input_hash(canonical_json(aset.to_json_dict())),
        homes=homes,
    )


def _check_collisions(qname: str, bucket: dict) -> None:
    names: dict[str, str] = {}

    def claim(name: str, what: str) -> None:
        if name in names:
            raise GenerationError(
                f"name collision in adapted module {qname}: {what} {name!r} vs {names[name]}"
            )
        names[name] = what

    for cls in bucket["classes"]:
        claim(cls.name, "class")
    for fn in bucket["functions"]:
        claim(fn.name, "function")
    seen_enum: dict[str, EnumSpec] = {}
    deduped_enums = []
    for e in bucket["enums"]:
        prior = seen_enum.get(e.spec.enum_name)
        if prior is not None:
            if prior != e.spec:
                raise GenerationError(
                    f"conflicting enum declarations named {e.spec.enum_name!r} in {qname}"
                )
            continue
        seen_enum[e.spec.enum_name] = e.spec
        deduped_enums.append(e)
        claim(e.spec.enum_name, "enum")
    bucket["enums"] = deduped_enums
    seen_group: dict[str, GroupSpec] = {}
    deduped_groups = []
    for g in bucket["groups"]:
        prior = seen_group.get(g.spec.group_name)
        if prior is not None:
            if prior != g.spec:
                raise GenerationError(
                    f"conflicting group declarations named {g.spec.group_name!r} in {qname}"
                )
            continue
        seen_group[g.spec.group_name] = g.spec
        deduped_groups.append(g)
        claim(g.spec.group_name, "group")
    bucket["groups"] = deduped_groups
    for cls in bucket["classes"]:
        for attr in cls.attributes:
            if attr.source.name in _RESERVED_WRAPPER_NAMES or attr.source.name in {
                m.source.qname.name for m in cls.methods
            }:
                raise GenerationError(
                    f"attribute name {attr.source.name!r} collides inside wrapper {cls.name}"
                )


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

_RUNTIME_SOURCE = '''\
"""Support runtime for generated wrappers."""


class _Unset:
    """Marker for omitted optional arguments; never forwarded."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNSET"

    def __bool__(self):
        return False


UNSET = _Unset()


def forward_positional(slots, extra=()):
    """Pack positional arguments, filling omitted slots from defaults.

    slots: (value, default) pairs in parameter order; extra: a *args tuple.
    Trailing omitted slots are dropped unless extra arguments follow them.
    """
    out = []
    pending = []
    for value, default in slots:
        if value is UNSET:
            pending.append(default)
        else:
            out.extend(pending)
            pending.clear()
            out.append(value)
    if extra:
        out.extend(pending)
        pending.clear()
        out.extend(extra)
    if any(v is UNSET for v in out):
        raise TypeError(
            "cannot forward positional arguments: an omitted earlier "
            "positional parameter has no literal default"
        )
    return out
'''


@dataclass(frozen=True)
class GeneratedSource:
    package_name: str
    files: tuple[tuple[str, str], ...]  # (relative path, text), sorted by path

    def to_json_dict(self) -> dict:
        return {
            "schema": SCHEMA_GENERATED,
            "package": self.package_name,
            "files": [{"path": p, "content": t} for p, t in self.files],
        }

    def write_to(self, out_dir: str | Path) -> None:
        base = Path(out_dir)
        for rel, text in self.files:
            path = base / rel
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")


def _module_rel_path(library_name: str, qname: str, all_qnames: set[str]) -> str:
    parts = qname.split(".")
    if parts[0] != library_name:
        raise GenerationError(f"adapted module {qname} is outside {library_name}")
    rest = parts[1:]
    if not rest:
        return "__init__.py"
    if any(q.startswith(qname + ".") for q in all_qnames):
        return "/".join(rest) + "/__init__.py"
    return "/".join(rest) + ".py"


def _src_alias(module_text: str) -> str:
    return "_src_" + module_text.replace(".", "_")


def _param_decl(p: AdaptedParam) -> str:
    if p.source.assignment_kind == VAR_POSITIONAL:
        return f"*{p.name}"
    if p.source.assignment_kind == VAR_KEYWORD:
        return f"**{p.name}"
    decl = p.name
    if p.hint:
        decl += f": {p.hint}"
    if not p.required:
        decl += " = UNSET" if p.hint else "=UNSET"
    return decl


def _signature(params: tuple[AdaptedParam, ...], with_self: bool) -> str:
    parts: list[str] = ["self"] if with_self else []
    last_posonly = -1
    has_var_pos = False
    for index, p in enumerate(params):
        if p.source.assignment_kind == POSITIONAL_ONLY:
            last_posonly = index
        if p.source.assignment_kind == VAR_POSITIONAL:
            has_var_pos = True
    star_emitted = has_var_pos
    for index, p in enumerate(params):
        if p.source.assignment_kind == KEYWORD_ONLY and not star_emitted:
            parts.append("*")
            star_emitted = True
        parts.append(_param_decl(p))
        if index == last_posonly:
            parts.append("/")
    return ", ".join(parts)


@dataclass
class _ForwardPlan:
    pos_slot_exprs: list[str]
    var_pos_name: Optional[str]
    kw_lines: list[str]
    var_kw_name: Optional[str]
    needs_pos: bool
    needs_kw: bool


def _forward_plan(c: AdaptedCallable) -> _ForwardPlan:
    has_var_pos = any(p.source.assignment_kind == VAR_POSITIONAL for p in c.params)
    var_pos_name = next(
        (p.name for p in c.params if p.source.assignment_kind == VAR_POSITIONAL), None
    )
    var_kw_name = next(
        (p.name for p in c.params if p.source.assignment_kind == VAR_KEYWORD), None
    )
    positional_kinds = {POSITIONAL_ONLY}
    if has_var_pos:
        positional_kinds.add(POSITIONAL_OR_KEYWORD)

    adapted_by_name = {p.name: p for p in c.params}
    baked_by_name = {b.source.name: b for b in c.baked}

    slots: list[str] = []
    for source_param in c.source.parameters:
        if source_param.assignment_kind not in positional_kinds:
            continue
        baked = baked_by_name.get(source_param.name)
        if baked is not None:
            slots.append(f"({baked.value_text}, {baked.value_text})")
            continue
        adapted = adapted_by_name.get(source_param.name)
        default = source_param.default
        default_expr = (
            default.text if default is not None and default.tag != "opaque_literal" else "UNSET"
        )
        if adapted is None:
            # Removed without a baked value, or turned into an attribute:
            # the slot behaves like an omission.
            slots.append(f"(UNSET, {default_expr})")
            continue
        slots.append(f"({adapted.name}, {default_expr})")
    while slots and slots[-1].startswith("(UNSET,"):
        slots.pop()

    kw_lines: list[str] = []
    for p in c.params:
        kind = p.source.assignment_kind
        if kind in (VAR_POSITIONAL, VAR_KEYWORD) or kind in positional_kinds:
            continue
        if p.mode == MODE_GROUP:
            if p.required:
                kw_lines.append(f"call_kwargs.update({p.name}._forwarded())")
            else:
                kw_lines.append(f"if {p.name} is not UNSET:")
                kw_lines.append(f"    call_kwargs.update({p.name}._forwarded())")
        elif p.mode == MODE_ENUM:
            if p.required:
                kw_lines.append(f"call_kwargs['{p.name}'] = {p.name}.value")
            else:
                kw_lines.append(f"if {p.name} is not UNSET:")
                kw_lines.append(f"    call_kwargs['{p.name}'] = {p.name}.value")
        else:
            if p.required:
                kw_lines.append(f"call_kwargs['{p.name}'] = {p.name}")
            else:
                kw_lines.append(f"if {p.name} is not UNSET:")
                kw_lines.append(f"    call_kwargs['{p.name}'] = {p.name}")
    for b in c.baked:
        if b.source.assignment_kind not in positional_kinds:
            kw_lines.append(f"call_kwargs['{b.source.name}'] = {b.value_text}")

    needs_pos = bool(slots) or has_var_pos
    needs_kw = bool(kw_lines) or var_kw_name is not None
    return _ForwardPlan(slots, var_pos_name, kw_lines, var_kw_name, needs_pos, needs_kw)


def _emit_binding(plan: _ForwardPlan, lines: list[str], indent: str) -> None:
    if plan.needs_kw:
        if plan.var_kw_name:
            lines.append(f"{indent}call_kwargs = dict({plan.var_kw_name})")
        else:
            lines.append(f"{indent}call_kwargs = {{}}")
        for raw in plan.kw_lines:
            lines.append(f"{indent}{raw}")
    if plan.needs_pos:
        slot_text = "[" + ", ".join(plan.pos_slot_exprs) + "]"
        extra = plan.var_pos_name if plan.var_pos_name else "()"
        lines.append(f"{indent}pos_args = forward_positional({slot_text}, {extra})")


def _call_args(plan: _ForwardPlan) -> str:
    parts = []
    if plan.needs_pos:
        parts.append("*pos_args")
    if plan.needs_kw:
        parts.append("**call_kwargs")
    return ", ".join(parts)


def _render_function(fn: AdaptedFunction) -> list[str]:
    c = fn.adapted
    plan = _forward_plan(c)
    target = f"{_src_alias(fn.source_module)}.{fn.name}"
    lines = [f"def {fn.name}({_signature(c.params, with_self=False)}):"]
    lines.append(f'    """Wrapper for {c.source.qname.render()}."""')
    _emit_binding(plan, lines, "    ")
    lines.append(f"    return {target}({_call_args(plan)})")
    return lines


def _render_class(cls: AdaptedClass) -> list[str]:
    lines = [f"class {cls.name}:"]
    lines.append(f'    """Wrapper for {cls.source.qname.render()}."""')
    target = f"{_src_alias(cls.source_module)}.{cls.name}"

    ctor = cls.constructor
    ctor_params = ctor.params if ctor is not None else ()
    plan = _forward_plan(ctor) if ctor is not None else None

    lines.append("")
    lines.append(f"    def __init__({_signature(ctor_params, with_self=True)}):")
    if plan is not None and (plan.needs_kw or plan.needs_pos):
        _emit_binding(plan, lines, "        ")
    if plan is not None and plan.needs_kw:
        lines.append("        self._kwargs = call_kwargs")
    else:
        lines.append("        self._kwargs = {}")
    if plan is not None and plan.needs_pos:
        lines.append("        self._pos = pos_args")
    else:
        lines.append("        self._pos = []")
    lines.append("        self._obj = None")
    for attr in cls.attributes:
        initial = attr.initial_text if attr.initial_text is not None else "UNSET"
        lines.append(f"        self.{attr.source.name} = {initial}")
    if cls.eager:
        lines.append("        self._instance()")

    lines.append("")
    lines.append("    def _instance(self):")
    lines.append("        if self._obj is None:")
    lines.append("            kwargs = dict(self._kwargs)")
    for attr in cls.attributes:
        lines.append(f"            if self.{attr.source.name} is not UNSET:")
        lines.append(f"                kwargs['{attr.source.name}'] = self.{attr.source.name}")
    lines.append(f"            self._obj = {target}(*self._pos, **kwargs)")
    lines.append("        return self._obj")

    for method in cls.methods:
        name = method.source.qname.name
        method_plan = _forward_plan(method)
        lines.append("")
        lines.append(f"    def {name}({_signature(method.params, with_self=True)}):")
        lines.append(f'        """Wrapper for {method.source.qname.render()}."""')
        _emit_binding(method_plan, lines, "        ")
        lines.append(f"        return self._instance().{name}({_call_args(method_plan)})")
    return lines


def _render_enum(e: GeneratedEnum) -> list[str]:
    lines = [f"class {e.spec.enum_name}(enum.Enum):"]
    lines.append(f'    """Closed value set for {e.source_param}."""')
    lines.append("")
    for member in e.spec.members:
        lines.append(f"    {member.member_name} = {LiteralValue.string(member.string_value).text}")
    return lines


def _render_group(g: GeneratedGroup) -> list[str]:
    spec = g.spec
    disc = spec.discriminator_param
    params_by_name = {p.name: p for p in g.source_callable.parameters}
    lines = [f"class {spec.group_name}:"]
    lines.append(
        f'    """Parameter object for {g.source_callable.qname.render()}#{disc}."""'
    )
    lines.append("")
    lines.append("    def __init__(self, values):")
    lines.append("        self._values = dict(values)")
    lines.append("")
    lines.append("    def _forwarded(self):")
    lines.append("        return dict(self._values)")
    for variant in spec.variants:
        disc_value = LiteralValue.string(variant.discriminator_value).text
        decls = []
        for member in variant.member_params:
            param = params_by_name[member]
            decl = member
            if param.type_hint_text:
                decl += f": {param.type_hint_text}"
            if param.default is not None:
                decl += " = UNSET" if param.type_hint_text else "=UNSET"
            decls.append(decl)
        lines.append("")
        lines.append("    @staticmethod")
        signature = ", ".join(decls)
        lines.append(f"    def {variant.variant_name}({signature}) -> {spec.group_name}:")
        lines.append(f"        values = {{{LiteralValue.string(disc).text}: {disc_value}}}")
        for member in variant.member_params:
            param = params_by_name[member]
            if param.default is not None:
                lines.append(f"        if {member} is not UNSET:")
                lines.append(f"            values['{member}'] = {member}")
            else:
                lines.append(f"        values['{member}'] = {member}")
        lines.append(f"        return {spec.group_name}(values)")
    return lines


def _render_module(
    adapted: AdaptedApiModel,
    mod: AdaptedModule,
    header: str,
    child_modules: list[str],
    package_rel: dict[str, str],
) -> str:
    body_parts: list[str] = []

    for e in mod.enums:
        body_parts.append("\n".join(_render_enum(e)))
    for g in mod.groups:
        body_parts.append("\n".join(_render_group(g)))
    for cls in mod.classes:
        body_parts.append("\n".join(_render_class(cls)))
    for fn in mod.functions:
        body_parts.append("\n".join(_render_function(fn)))

    # A re-export whose target now lives in this very module adds nothing.
    reexports = []
    for alias, target in sorted(mod.reexports):
        name = target.rsplit(".", 1)[-1]
        home = adapted.homes[target]
        if home == mod.qname and alias == name:
            continue
        reexports.append((alias, target, name, home))

    export_names = sorted(
        [c.name for c in mod.classes]
        + [f.name for f in mod.functions]
        + [e.spec.enum_name for e in mod.enums]
        + [g.spec.group_name for g in mod.groups]
        + [alias for alias, _t, _n, _h in reexports]
        + list(child_modules)
    )
    seen: set[str] = set()
    for name in export_names:
        if name in seen:
            raise GenerationError(
                f"name collision in adapted module {mod.qname}: {name!r} exported twice"
            )
        seen.add(name)

    import_lines: list[str] = []
    body_text = "\n\n\n".join(body_parts)
    if "enum.Enum" in body_text:
        import_lines.append("import enum")
        import_lines.append("")
    source_modules = sorted(
        {c.source_module for c in mod.classes} | {f.source_module for f in mod.functions}
    )
    for source in source_modules:
        import_lines.append(f"import {source} as {_src_alias(source)}")
    if source_modules:
        import_lines.append("")

    # Dots to reach the generated package root from this file.
    rel_path = package_rel[mod.qname]
    dots = "." * (rel_path.count("/") + 1)
    relative_imports: list[str] = []
    runtime_names = []
    if "UNSET" in body_text:
        runtime_names.append("UNSET")
    if "forward_positional(" in body_text:
        runtime_names.append("forward_positional")
    if runtime_names:
        relative_imports.append(f"from {dots}_runtime import {', '.join(runtime_names)}")
    for child in sorted(child_modules):
        relative_imports.append(f"from . import {child}")
    assignment_lines: list[str] = []
    for alias, target, name, home in reexports:
        if home == mod.qname:
            assignment_lines.append(f"{alias} = {name}")
            continue
        home_rel = _relative_module_ref(rel_path, package_rel[home])
        if alias == name:
            relative_imports.append(f"from {home_rel} import {name}")
        else:
            relative_imports.append(f"from {home_rel} import {name} as {alias}")

    chunks = [header, "from __future__ import annotations", ""]
    if import_lines:
        chunks.extend(import_lines)
    if relative_imports:
        chunks.extend(sorted(relative_imports))
        chunks.append("")
    exports = ", ".join(f"'{n}'" for n in export_names)
    chunks.append(f"__all__ = [{exports}]")
    if body_text:
        chunks.append("")
        chunks.append("")
        chunks.append(body_text)
    if assignment_lines:
        chunks.append("")
        chunks.extend(sorted(assignment_lines))
    text = "\n".join(chunks)
    return text.rstrip("\n") + "\n"


def _relative_module_ref(from_rel: str, to_rel: str) -> str:
    """Relative import path from one generated file to another module."""
    from_dir = from_rel.split("/")[:-1]
    to_parts = to_rel[: -len(".py")].split("/")
    if to_parts[-1] == "__init__":
        to_parts = to_parts[:-1]
    # Pop the shared directory prefix, then climb out of what remains.
    common = 0
    while (
        common < len(from_dir)
        and common < len(to_parts)
        and from_dir[common] == to_parts[common]
    ):
        common += 1
    dots = "." * (len(from_dir) - common + 1)
    suffix = ".".join(to_parts[common:])
    return dots + suffix if suffix else dots


def render_wrappers(
    adapted: AdaptedApiModel, package_name: Optional[str] = None
) -> GeneratedSource:
    """Emit the wrapper package; byte-identical for identical inputs."""
    package = package_name or f"{adapted.library_name}_slim"
    if not package.isidentifier() or keyword.iskeyword(package):
        raise GenerationError(f"not a valid package name: {package!r}")

    header = (
        f"# Generated by apislim {_tool_version}. Do not edit.\n"
        f"# Inputs: api {adapted.api_hash} annotations {adapted.annotations_hash}"
    )

    kept_modules = [
        m
        for m in adapted.modules
        if m.qname == adapted.library_name
        or m.classes
        or m.functions
        or m.enums
        or m.groups
        or m.reexports
    ]
    all_qnames = {m.qname for m in kept_modules}
    # Parent packages that exist only to hold deeper modules still need files;
    # the library root always does.
    synthetic: set[str] = {adapted.library_name} - all_qnames
    for qname in all_qnames:
        parts = qname.split(".")
        for cut in range(1, len(parts)):
            prefix = ".".join(parts[:cut])
            if prefix not in all_qnames:
                synthetic.add(prefix)
    by_qname = {m.qname: m for m in kept_modules}
    for qname in synthetic:
        by_qname[qname] = AdaptedModule(qname=qname)
    every_qname = set(by_qname)

    package_rel = {
        qname: _module_rel_path(adapted.library_name, qname, every_qname)
        for qname in every_qname
    }

    children: dict[str, list[str]] = {q: [] for q in every_qname}
    for qname in every_qname:
        if "." in qname:
            parent = qname.rsplit(".", 1)[0]
            children[parent].append(qname.rsplit(".", 1)[1])

    files: dict[str, str] = {}
    files[f"{package}/_runtime.py"] = f"{header}\n\n{_RUNTIME_SOURCE}"
    for qname, mod in by_qname.items():
        rel = package_rel[qname]
        files[f"{package}/{rel}"] = _render_module(
            adapted, mod, header, children[qname], package_rel
        )

    ordered = tuple(sorted(files.items()))
    return GeneratedSource(package_name=package, files=ordered)


def generate(
    model: ApiModel, aset: AnnotationSet, package_name: Optional[str] = None
) -> GeneratedSource:
    return render_wrappers(infer_adapted_api(model, aset), package_name)
