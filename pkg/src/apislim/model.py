"""Canonical representation of a library's API surface.

Everything downstream (mining, classification, annotation, generation,
diffing) speaks in terms of the immutable :class:`ApiModel` defined here and
the qualified-name text form it is indexed by.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterator, Optional, Union

from .jsonutil import canonical_json

SCHEMA_API = "api/1"

PARAM_SEP = "#"
DYNAMIC_TEXT = "«dynamic»"

KIND_MODULE = "module"
KIND_CLASS = "class"
KIND_FUNCTION = "function"
KIND_PARAMETER = "parameter"
NAME_KINDS = frozenset({KIND_MODULE, KIND_CLASS, KIND_FUNCTION, KIND_PARAMETER})

POSITIONAL_OR_KEYWORD = "positional_or_keyword"
KEYWORD_ONLY = "keyword_only"
POSITIONAL_ONLY = "positional_only"
VAR_POSITIONAL = "var_positional"
VAR_KEYWORD = "var_keyword"
ASSIGNMENT_KINDS = frozenset(
    {POSITIONAL_OR_KEYWORD, KEYWORD_ONLY, POSITIONAL_ONLY, VAR_POSITIONAL, VAR_KEYWORD}
)

_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def is_identifier(text: str) -> bool:
    return bool(_IDENT_RE.match(text))


class ModelError(ValueError):
    """Raised for malformed names, values, or model documents."""


@dataclass(frozen=True)
class QualifiedName:
    """Dotted name of an API element; parameters hang off their callable via '#'."""

    segments: tuple[str, ...]
    kind: str

    def __post_init__(self) -> None:
        if not self.segments:
            raise ModelError("qualified name needs at least one segment")
        for seg in self.segments:
            if not is_identifier(seg):
                raise ModelError(f"invalid identifier segment: {seg!r}")
        if self.kind not in NAME_KINDS:
            raise ModelError(f"unknown name kind: {self.kind!r}")
        if self.kind == KIND_PARAMETER and len(self.segments) < 2:
            raise ModelError("parameter names need an owning callable")

    def render(self) -> str:
        """Canonical text form, e.g. ``pkg.mod.Cls.__init__#alpha``."""
        if self.kind == KIND_PARAMETER:
            return ".".join(self.segments[:-1]) + PARAM_SEP + self.segments[-1]
        return ".".join(self.segments)

    @property
    def name(self) -> str:
        return self.segments[-1]

    def child(self, segment: str, kind: str) -> "QualifiedName":
        return QualifiedName(self.segments + (segment,), kind)

    @staticmethod
    def parse(text: str, kind: Optional[str] = None) -> "QualifiedName":
        """Parse a canonical text form.

        '#' marks a parameter; other kinds are not recoverable from text
        alone, so ``kind`` defaults to function when omitted.
        """
        if PARAM_SEP in text:
            head, _, param = text.partition(PARAM_SEP)
            if kind not in (None, KIND_PARAMETER):
                raise ModelError(f"{text!r} is a parameter name, not a {kind}")
            return QualifiedName(tuple(head.split(".")) + (param,), KIND_PARAMETER)
        if kind == KIND_PARAMETER:
            raise ModelError(f"parameter name must contain {PARAM_SEP!r}: {text!r}")
        return QualifiedName(tuple(text.split(".")), kind or KIND_FUNCTION)


def render_qname(q: QualifiedName) -> str:
    return q.render()


def parse_qname(text: str, kind: Optional[str] = None) -> QualifiedName:
    return QualifiedName.parse(text, kind)


# ---------------------------------------------------------------------------
# Literal values
# ---------------------------------------------------------------------------

LIT_NONE = "none"
LIT_BOOL = "bool"
LIT_INT = "int"
LIT_FLOAT = "float"
LIT_STRING = "string"
LIT_DYNAMIC = "dynamic"
LIT_OPAQUE = "opaque_literal"
LITERAL_TAGS = frozenset(
    {LIT_NONE, LIT_BOOL, LIT_INT, LIT_FLOAT, LIT_STRING, LIT_DYNAMIC, LIT_OPAQUE}
)

_ESCAPES = {"\\": "\\\\", "'": "\\'", "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def _quote_string(value: str) -> str:
    # Deterministic single-quoted form regardless of repr()'s quote choice.
    out = ["'"]
    for ch in value:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\x{ord(ch):02x}")
        else:
            out.append(ch)
    out.append("'")
    return "".join(out)


@dataclass(frozen=True)
class LiteralValue:
    """A normalized literal (or the dynamic/opaque sentinels) as text.

    Two values are the same value iff their ``text`` is equal; normalization
    makes that decidable without evaluating code.
    """

    tag: str
    text: str

    def __post_init__(self) -> None:
        if self.tag not in LITERAL_TAGS:
            raise ModelError(f"unknown literal tag: {self.tag!r}")
        if self.tag == LIT_DYNAMIC and self.text != DYNAMIC_TEXT:
            raise ModelError("dynamic literal carries the fixed sentinel text")

    @staticmethod
    def none() -> "LiteralValue":
        return LiteralValue(LIT_NONE, "None")

    @staticmethod
    def boolean(value: bool) -> "LiteralValue":
        return LiteralValue(LIT_BOOL, "True" if value else "False")

    @staticmethod
    def integer(value: int) -> "LiteralValue":
        return LiteralValue(LIT_INT, repr(value))

    @staticmethod
    def floating(value: float) -> "LiteralValue":
        return LiteralValue(LIT_FLOAT, repr(value))

    @staticmethod
    def string(value: str) -> "LiteralValue":
        return LiteralValue(LIT_STRING, _quote_string(value))

    @staticmethod
    def dynamic() -> "LiteralValue":
        return LiteralValue(LIT_DYNAMIC, DYNAMIC_TEXT)

    @staticmethod
    def opaque(source_text: str) -> "LiteralValue":
        return LiteralValue(LIT_OPAQUE, source_text)

    @staticmethod
    def from_python(value: Any) -> "LiteralValue":
        if value is None:
            return LiteralValue.none()
        if isinstance(value, bool):
            return LiteralValue.boolean(value)
        if isinstance(value, int):
            return LiteralValue.integer(value)
        if isinstance(value, float):
            return LiteralValue.floating(value)
        if isinstance(value, str):
            return LiteralValue.string(value)
        raise ModelError(f"not a supported literal: {value!r}")

    @staticmethod
    def from_text(text: str) -> "LiteralValue":
        """Recover a value from its normalized text (inverse of rendering)."""
        if text == "None":
            return LiteralValue.none()
        if text in ("True", "False"):
            return LiteralValue(LIT_BOOL, text)
        if text == DYNAMIC_TEXT:
            return LiteralValue.dynamic()
        if text.startswith("'") and text.endswith("'") and len(text) >= 2:
            return LiteralValue(LIT_STRING, text)
        try:
            return LiteralValue.integer(int(text))
        except ValueError:
            pass
        try:
            return LiteralValue.floating(float(text))
        except ValueError:
            pass
        return LiteralValue.opaque(text)

    def to_json(self) -> dict:
        return {"tag": self.tag, "text": self.text}

    @staticmethod
    def from_json(data: dict) -> "LiteralValue":
        return LiteralValue(data["tag"], data["text"])


# ---------------------------------------------------------------------------
# Signature elements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Parameter:
    name: str
    position: int
    assignment_kind: str
    default: Optional[LiteralValue] = None
    type_hint_text: Optional[str] = None

    def __post_init__(self) -> None:
        if self.assignment_kind not in ASSIGNMENT_KINDS:
            raise ModelError(f"unknown assignment kind: {self.assignment_kind!r}")
        if self.assignment_kind in (VAR_POSITIONAL, VAR_KEYWORD) and self.default is not None:
            raise ModelError(f"variadic parameter {self.name!r} cannot carry a default")

    @property
    def is_variadic(self) -> bool:
        return self.assignment_kind in (VAR_POSITIONAL, VAR_KEYWORD)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "position": self.position,
            "kind": self.assignment_kind,
            "default": self.default.to_json() if self.default else None,
            "type_hint": self.type_hint_text,
        }

    @staticmethod
    def from_json(data: dict) -> "Parameter":
        default = data.get("default")
        return Parameter(
            name=data["name"],
            position=data["position"],
            assignment_kind=data["kind"],
            default=LiteralValue.from_json(default) if default else None,
            type_hint_text=data.get("type_hint"),
        )


@dataclass(frozen=True)
class Callable:
    qname: QualifiedName
    parameters: tuple[Parameter, ...] = ()
    is_constructor: bool = False
    docstring: Optional[str] = None
    decorators: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        positions = [p.position for p in self.parameters]
        if positions != list(range(len(positions))):
            raise ModelError(f"parameter positions not contiguous in {self.qname.render()}")
        names = [p.name for p in self.parameters]
        if len(set(names)) != len(names):
            raise ModelError(f"duplicate parameter names in {self.qname.render()}")
        if self.is_constructor and self.qname.name != "__init__":
            raise ModelError("constructors are named __init__")

    @property
    def name(self) -> str:
        return self.qname.name

    def parameter(self, name: str) -> Optional[Parameter]:
        for p in self.parameters:
            if p.name == name:
                return p
        return None

    def to_json(self) -> dict:
        return {
            "qname": self.qname.render(),
            "constructor": self.is_constructor,
            "docstring": self.docstring,
            "decorators": list(self.decorators),
            "parameters": [p.to_json() for p in self.parameters],
        }

    @staticmethod
    def from_json(data: dict) -> "Callable":
        return Callable(
            qname=QualifiedName.parse(data["qname"], KIND_FUNCTION),
            parameters=tuple(Parameter.from_json(p) for p in data["parameters"]),
            is_constructor=data["constructor"],
            docstring=data.get("docstring"),
            decorators=tuple(data.get("decorators", ())),
        )


@dataclass(frozen=True)
class ClassInfo:
    qname: QualifiedName
    superclass_names: tuple[str, ...] = ()
    methods: tuple[Callable, ...] = ()
    docstring: Optional[str] = None
    decorators: tuple[str, ...] = ()

    @property
    def name(self) -> str:
        return self.qname.name

    @property
    def constructor(self) -> Optional[Callable]:
        for m in self.methods:
            if m.is_constructor:
                return m
        return None

    def to_json(self) -> dict:
        return {
            "qname": self.qname.render(),
            "superclasses": list(self.superclass_names),
            "docstring": self.docstring,
            "decorators": list(self.decorators),
            "methods": [m.to_json() for m in self.methods],
        }

    @staticmethod
    def from_json(data: dict) -> "ClassInfo":
        return ClassInfo(
            qname=QualifiedName.parse(data["qname"], KIND_CLASS),
            superclass_names=tuple(data.get("superclasses", ())),
            methods=tuple(Callable.from_json(m) for m in data["methods"]),
            docstring=data.get("docstring"),
            decorators=tuple(data.get("decorators", ())),
        )


@dataclass(frozen=True)
class ModuleInfo:
    qname: QualifiedName
    classes: tuple[ClassInfo, ...] = ()
    functions: tuple[Callable, ...] = ()
    reexports: tuple[tuple[str, str], ...] = ()  # (public alias text, defining text)

    def to_json(self) -> dict:
        return {
            "qname": self.qname.render(),
            "classes": [c.to_json() for c in self.classes],
            "functions": [f.to_json() for f in self.functions],
            "reexports": [{"alias": a, "target": t} for a, t in self.reexports],
        }

    @staticmethod
    def from_json(data: dict) -> "ModuleInfo":
        return ModuleInfo(
            qname=QualifiedName.parse(data["qname"], KIND_MODULE),
            classes=tuple(ClassInfo.from_json(c) for c in data["classes"]),
            functions=tuple(Callable.from_json(f) for f in data["functions"]),
            reexports=tuple((r["alias"], r["target"]) for r in data["reexports"]),
        )


Element = Union[ModuleInfo, ClassInfo, Callable, Parameter]


def _is_private_segment(segment: str) -> bool:
    # Dunders (__init__, __all__) are conventional API, not private.
    if segment.startswith("__") and segment.endswith("__") and len(segment) > 4:
        return False
    return segment.startswith("_")


def _segments_public(segments: tuple[str, ...]) -> bool:
    return not any(_is_private_segment(s) for s in segments)


@dataclass(frozen=True)
class ApiModel:
    """One library version's API surface. Immutable and safely shareable."""

    library_name: str
    library_version: str
    modules: tuple[ModuleInfo, ...]

    # -- indexing ----------------------------------------------------------

    @cached_property
    def _index(self) -> dict[str, Element]:
        index: dict[str, Element] = {}

        def define(text: str, element: Element) -> None:
            if text in index:
                raise ModelError(f"duplicate definition: {text}")
            index[text] = element

        for mod in self.modules:
            define(mod.qname.render(), mod)
            for func in mod.functions:
                define(func.qname.render(), func)
                for p in func.parameters:
                    define(func.qname.render() + PARAM_SEP + p.name, p)
            for cls in mod.classes:
                define(cls.qname.render(), cls)
                for meth in cls.methods:
                    define(meth.qname.render(), meth)
                    for p in meth.parameters:
                        define(meth.qname.render() + PARAM_SEP + p.name, p)
        return index

    @cached_property
    def _aliases(self) -> dict[str, str]:
        aliases: dict[str, str] = {}
        for mod in self.modules:
            for alias, target in mod.reexports:
                aliases[alias] = target
        return aliases

    @cached_property
    def _owners(self) -> dict[str, str]:
        """Defining-parent text for every non-module element."""
        owners: dict[str, str] = {}
        for mod in self.modules:
            mtext = mod.qname.render()
            for func in mod.functions:
                owners[func.qname.render()] = mtext
                for p in func.parameters:
                    owners[func.qname.render() + PARAM_SEP + p.name] = func.qname.render()
            for cls in mod.classes:
                owners[cls.qname.render()] = mtext
                for meth in cls.methods:
                    owners[meth.qname.render()] = cls.qname.render()
                    for p in meth.parameters:
                        owners[meth.qname.render() + PARAM_SEP + p.name] = meth.qname.render()
        return owners

    @cached_property
    def _public(self) -> frozenset[str]:
        public: set[str] = set()
        texts = list(self._index)
        for text in texts:
            element = self._index[text]
            if isinstance(element, Parameter):
                continue  # handled below, parameters inherit
            if _segments_public(element.qname.segments):
                public.add(text)
        # Re-exports under a public alias make the target (and whatever hangs
        # below it through non-private names) public.
        for alias, target in self._aliases.items():
            alias_q = QualifiedName.parse(alias, self._kind_of(target))
            if not _segments_public(alias_q.segments):
                continue
            if target not in self._index:
                continue
            for text in texts:
                if text == target:
                    public.add(text)
                elif text.startswith(target + ".") or text.startswith(target + PARAM_SEP):
                    below = re.split(r"[.#]", text[len(target) + 1 :])
                    if not any(_is_private_segment(s) for s in below):
                        public.add(text)
        # Parameters inherit publicness from their callable.
        for text, element in self._index.items():
            if isinstance(element, Parameter):
                if self._owners[text] in public:
                    public.add(text)
        return frozenset(public)

    def _kind_of(self, text: str) -> str:
        element = self._index.get(text)
        if isinstance(element, ModuleInfo):
            return KIND_MODULE
        if isinstance(element, ClassInfo):
            return KIND_CLASS
        if isinstance(element, Parameter):
            return KIND_PARAMETER
        return KIND_FUNCTION

    # -- queries -----------------------------------------------------------

    def lookup(self, text: str) -> Optional[Element]:
        """The unique defining element for a rendered qname, alias-aware."""
        element = self._index.get(text)
        if element is not None:
            return element
        target = self._aliases.get(text)
        if target is not None:
            return self._index.get(target)
        return None

    def defines(self, text: str) -> bool:
        return text in self._index

    def resolve_text(self, text: str) -> Optional[tuple[str, Element]]:
        """(defining text, element) for a possibly alias-prefixed dotted path.

        Handles `minilearn.Ridge.fit` where `minilearn.Ridge` is a re-export
        alias of `minilearn.models.Ridge`.
        """
        element = self._index.get(text)
        if element is not None:
            return text, element
        target = self._aliases.get(text)
        if target is not None and target in self._index:
            return target, self._index[target]
        parts = text.split(".")
        for cut in range(len(parts) - 1, 0, -1):
            prefix = ".".join(parts[:cut])
            target = self._aliases.get(prefix)
            if target is None:
                continue
            candidate = target + "." + ".".join(parts[cut:])
            element = self._index.get(candidate)
            if element is not None:
                return candidate, element
        return None

    def is_public(self, name: Union[QualifiedName, str]) -> bool:
        text = name.render() if isinstance(name, QualifiedName) else name
        if text not in self._index:
            if text in self._aliases:
                text = self._aliases[text]
            else:
                raise KeyError(f"unknown API element: {text}")
        return text in self._public

    def owner_text(self, text: str) -> Optional[str]:
        return self._owners.get(text)

    def class_of(self, callable_text: str) -> Optional[ClassInfo]:
        owner = self._owners.get(callable_text)
        if owner is None:
            return None
        element = self._index.get(owner)
        return element if isinstance(element, ClassInfo) else None

    def iter_classes(self) -> Iterator[ClassInfo]:
        for mod in self.modules:
            yield from mod.classes

    def iter_callables(self) -> Iterator[Callable]:
        for mod in self.modules:
            yield from mod.functions
            for cls in mod.classes:
                yield from cls.methods

    def iter_parameters(self) -> Iterator[tuple[str, Callable, Parameter]]:
        """(param qname text, owning callable, parameter) for all parameters."""
        for c in self.iter_callables():
            base = c.qname.render()
            for p in c.parameters:
                yield base + PARAM_SEP + p.name, c, p

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "schema": SCHEMA_API,
            "library": {"name": self.library_name, "version": self.library_version},
            "modules": [m.to_json() for m in sorted(self.modules, key=lambda m: m.qname.render())],
        }

    def to_bytes(self) -> bytes:
        return canonical_json(self.to_json_dict())

    @staticmethod
    def from_json_dict(data: dict) -> "ApiModel":
        if data.get("schema") != SCHEMA_API:
            raise ModelError(f"expected schema {SCHEMA_API}, got {data.get('schema')!r}")
        model = ApiModel(
            library_name=data["library"]["name"],
            library_version=data["library"]["version"],
            modules=tuple(ModuleInfo.from_json(m) for m in data["modules"]),
        )
        model._index  # force duplicate-definition validation
        return model


def is_public(model: ApiModel, q: Union[QualifiedName, str]) -> bool:
    return model.is_public(q)


def lookup(model: ApiModel, text: str) -> Optional[Element]:
    return model.lookup(text)
