"""Static extraction of an ApiModel from a library's source tree.

The library is never imported: every fact comes from parsing source files
with :mod:`ast`. Dynamically created elements are therefore invisible,
which is a recorded limitation, not a bug.
"""

from __future__ import annotations

import ast
import fnmatch
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional

from .jsonutil import SCHEMA_EXTRACT_REPORT
from .model import (
    ApiModel,
    Callable,
    ClassInfo,
    KEYWORD_ONLY,
    KIND_CLASS,
    KIND_FUNCTION,
    KIND_MODULE,
    LiteralValue,
    ModuleInfo,
    POSITIONAL_ONLY,
    POSITIONAL_OR_KEYWORD,
    Parameter,
    QualifiedName,
    VAR_KEYWORD,
    VAR_POSITIONAL,
    is_identifier,
)


@dataclass(frozen=True)
class SourceTree:
    """A library source tree and the file set selected from it."""

    root: Path
    include: tuple[str, ...] = ("**/*.py",)
    exclude: tuple[str, ...] = ()

    @staticmethod
    def at(root: str | Path, exclude: Iterable[str] = ()) -> "SourceTree":
        path = Path(root)
        if not path.is_dir():
            raise FileNotFoundError(f"source root not found: {path}")
        return SourceTree(root=path, exclude=tuple(exclude))

    def discover(self) -> list[tuple[str, Path]]:
        """(module qname text, file path) pairs, sorted by module text.

        `a/b.py` maps to module `a.b`, `a/__init__.py` to `a`.
        """
        if not self.root.is_dir():
            raise FileNotFoundError(f"source root not found: {self.root}")
        found: list[tuple[str, Path]] = []
        for path in sorted(self.root.rglob("*.py")):
            rel = path.relative_to(self.root)
            parts = rel.parts
            if any(p.startswith(".") or p == "__pycache__" for p in parts[:-1]):
                continue
            rel_text = rel.as_posix()
            if any(fnmatch.fnmatch(rel_text, pat) for pat in self.exclude):
                continue
            mod_parts = list(rel.with_suffix("").parts)
            if mod_parts and mod_parts[-1] == "__init__":
                mod_parts = mod_parts[:-1]
            if not mod_parts:
                continue
            found.append((".".join(mod_parts), path))
        found.sort(key=lambda pair: pair[0])
        return found


@dataclass
class ExtractReport:
    """Per-run warnings; one entry per skipped or suspicious file."""

    root: str
    files_total: int = 0
    files_parsed: int = 0
    warnings: list[dict] = field(default_factory=list)

    def warn(self, file: str, message: str) -> None:
        self.warnings.append({"file": file, "message": message})

    def to_json_dict(self) -> dict:
        return {
            "schema": SCHEMA_EXTRACT_REPORT,
            "root": self.root,
            "files_total": self.files_total,
            "files_parsed": self.files_parsed,
            "warnings": sorted(self.warnings, key=lambda w: (w["file"], w["message"])),
        }


@dataclass(frozen=True)
class SurfaceCounts:
    classes_total: int
    classes_public: int
    functions_total: int
    functions_public: int
    params_total: int
    params_public: int

    def to_json_dict(self) -> dict:
        return {
            "classes": {"total": self.classes_total, "public": self.classes_public},
            "functions": {"total": self.functions_total, "public": self.functions_public},
            "parameters": {"total": self.params_total, "public": self.params_public},
        }


# ---------------------------------------------------------------------------
# Signature and statement helpers
# ---------------------------------------------------------------------------


def literal_from_expr(node: ast.expr) -> Optional[LiteralValue]:
    """The normalized literal for an expression, or None if non-literal."""
    if isinstance(node, ast.Constant):
        value = node.value
        if value is None or isinstance(value, (bool, int, float, str)):
            return LiteralValue.from_python(value)
        return None
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
        inner = node.operand
        if isinstance(inner, ast.Constant) and type(inner.value) in (int, float):
            value = -inner.value if isinstance(node.op, ast.USub) else +inner.value
            return LiteralValue.from_python(value)
    return None


def _default_value(node: Optional[ast.expr]) -> Optional[LiteralValue]:
    if node is None:
        return None
    literal = literal_from_expr(node)
    if literal is not None:
        return literal
    return LiteralValue.opaque(ast.unparse(node))


def _hint_text(node: Optional[ast.expr]) -> Optional[str]:
    return ast.unparse(node) if node is not None else None


def extract_parameters(args: ast.arguments, drop_first: bool) -> tuple[Parameter, ...]:
    """Model parameters in source order; optionally drops the self/cls slot."""
    slots: list[tuple[ast.arg, str, Optional[ast.expr]]] = []
    positional = list(args.posonlyargs) + list(args.args)
    defaults: list[Optional[ast.expr]] = [None] * (len(positional) - len(args.defaults))
    defaults += list(args.defaults)
    for arg, default in zip(args.posonlyargs, defaults):
        slots.append((arg, POSITIONAL_ONLY, default))
    for arg, default in zip(args.args, defaults[len(args.posonlyargs):]):
        slots.append((arg, POSITIONAL_OR_KEYWORD, default))
    if args.vararg is not None:
        slots.append((args.vararg, VAR_POSITIONAL, None))
    for arg, default in zip(args.kwonlyargs, args.kw_defaults):
        slots.append((arg, KEYWORD_ONLY, default))
    if args.kwarg is not None:
        slots.append((args.kwarg, VAR_KEYWORD, None))

    if drop_first and slots and slots[0][1] in (POSITIONAL_ONLY, POSITIONAL_OR_KEYWORD):
        slots = slots[1:]

    return tuple(
        Parameter(
            name=arg.arg,
            position=index,
            assignment_kind=kind,
            default=_default_value(default),
            type_hint_text=_hint_text(arg.annotation),
        )
        for index, (arg, kind, default) in enumerate(slots)
    )


def _decorator_texts(node: ast.FunctionDef | ast.AsyncFunctionDef | ast.ClassDef) -> tuple[str, ...]:
    return tuple(ast.unparse(d) for d in node.decorator_list)


def _is_property_mutator(node: ast.FunctionDef | ast.AsyncFunctionDef) -> bool:
    # Skip `@x.setter` / `@x.deleter`; the getter already defines the element.
    for deco in node.decorator_list:
        if isinstance(deco, ast.Attribute) and deco.attr in ("setter", "deleter"):
            return True
    return False


def _is_staticmethod(node: ast.FunctionDef | ast.AsyncFunctionDef) -> bool:
    for deco in node.decorator_list:
        if isinstance(deco, ast.Name) and deco.id == "staticmethod":
            return True
    return False


def _iter_statements(body: Iterable[ast.stmt]) -> Iterator[ast.stmt]:
    """Statements in execution order, descending into if/try blocks."""
    for stmt in body:
        yield stmt
        if isinstance(stmt, ast.If):
            yield from _iter_statements(stmt.body)
            yield from _iter_statements(stmt.orelse)
        elif isinstance(stmt, ast.Try):
            yield from _iter_statements(stmt.body)
            for handler in stmt.handlers:
                yield from _iter_statements(handler.body)
            yield from _iter_statements(stmt.orelse)
            yield from _iter_statements(stmt.finalbody)


def build_file_import_map(tree: ast.Module, module_qname: str, is_package: bool) -> dict[str, str]:
    """Local name -> qname text, from one library file's own imports."""
    package_parts = module_qname.split(".") if is_package else module_qname.split(".")[:-1]
    table: dict[str, str] = {}
    for stmt in _iter_statements(tree.body):
        if isinstance(stmt, ast.Import):
            for alias in stmt.names:
                if alias.asname:
                    table[alias.asname] = alias.name
                else:
                    table[alias.name.split(".")[0]] = alias.name.split(".")[0]
        elif isinstance(stmt, ast.ImportFrom):
            if stmt.level > 0:
                base_parts = package_parts[: len(package_parts) - (stmt.level - 1)]
                if stmt.level - 1 > len(package_parts):
                    continue
                base = ".".join(base_parts + (stmt.module.split(".") if stmt.module else []))
            else:
                base = stmt.module or ""
            if not base:
                continue
            for alias in stmt.names:
                if alias.name == "*":
                    continue
                table[alias.asname or alias.name] = f"{base}.{alias.name}"
    return table


def _collect_all_names(tree: ast.Module) -> Optional[list[str]]:
    """The last top-level `__all__` list/tuple of string literals, if any."""
    names: Optional[list[str]] = None
    for stmt in tree.body:
        target = None
        if isinstance(stmt, ast.Assign) and len(stmt.targets) == 1:
            target = stmt.targets[0]
            value = stmt.value
        elif isinstance(stmt, ast.AnnAssign) and stmt.value is not None:
            target = stmt.target
            value = stmt.value
        else:
            continue
        if not (isinstance(target, ast.Name) and target.id == "__all__"):
            continue
        if isinstance(value, (ast.List, ast.Tuple)) and all(
            isinstance(e, ast.Constant) and isinstance(e.value, str) for e in value.elts
        ):
            names = [e.value for e in value.elts]
    return names


# ---------------------------------------------------------------------------
# Module assembly
# ---------------------------------------------------------------------------


@dataclass
class _ParsedModule:
    qname: str
    file: str
    is_package: bool
    classes: list[ClassInfo]
    functions: list[Callable]
    all_names: Optional[list[str]]
    import_map: dict[str, str]
    defined_names: set[str]


def _extract_callable(
    node: ast.FunctionDef | ast.AsyncFunctionDef,
    qname: QualifiedName,
    *,
    method_of_class: bool,
) -> Callable:
    drop_first = method_of_class and not _is_staticmethod(node)
    return Callable(
        qname=qname,
        parameters=extract_parameters(node.args, drop_first=drop_first),
        is_constructor=method_of_class and node.name == "__init__",
        docstring=ast.get_docstring(node, clean=False),
        decorators=_decorator_texts(node),
    )


def _extract_class(node: ast.ClassDef, module_q: QualifiedName) -> ClassInfo:
    class_q = module_q.child(node.name, KIND_CLASS)
    methods: dict[str, Callable] = {}
    for stmt in node.body:
        if not isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
            continue
        if _is_property_mutator(stmt):
            continue
        methods[stmt.name] = _extract_callable(
            stmt, class_q.child(stmt.name, KIND_FUNCTION), method_of_class=True
        )
    return ClassInfo(
        qname=class_q,
        superclass_names=tuple(ast.unparse(b) for b in node.bases),
        methods=tuple(methods.values()),
        docstring=ast.get_docstring(node, clean=False),
        decorators=_decorator_texts(node),
    )


def _parse_module(qname: str, path: Path, report: ExtractReport) -> Optional[_ParsedModule]:
    rel_file = str(path)
    try:
        source = path.read_text(encoding="utf-8")
        tree = ast.parse(source)
    except (SyntaxError, UnicodeDecodeError, OSError) as exc:
        report.warn(rel_file, f"skipped: {exc.__class__.__name__}: {exc}")
        return None

    module_q = QualifiedName.parse(qname, KIND_MODULE)
    classes: dict[str, ClassInfo] = {}
    functions: dict[str, Callable] = {}
    for stmt in _iter_statements(tree.body):
        if isinstance(stmt, ast.ClassDef):
            functions.pop(stmt.name, None)
            classes[stmt.name] = _extract_class(stmt, module_q)
        elif isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
            classes.pop(stmt.name, None)
            functions[stmt.name] = _extract_callable(
                stmt, module_q.child(stmt.name, KIND_FUNCTION), method_of_class=False
            )

    is_package = path.name == "__init__.py"
    return _ParsedModule(
        qname=qname,
        file=rel_file,
        is_package=is_package,
        classes=list(classes.values()),
        functions=list(functions.values()),
        all_names=_collect_all_names(tree),
        import_map=build_file_import_map(tree, qname, is_package),
        defined_names={*classes, *functions},
    )


def _resolve_reexports(
    parsed: _ParsedModule, defined: set[str], report: ExtractReport
) -> tuple[tuple[str, str], ...]:
    if not parsed.all_names:
        return ()
    out: list[tuple[str, str]] = []
    for name in parsed.all_names:
        alias = f"{parsed.qname}.{name}"
        if name in parsed.defined_names:
            continue  # self-export; the definition is already the public name
        target = parsed.import_map.get(name)
        if target is None or target not in defined:
            report.warn(parsed.file, f"unresolved __all__ entry: {name}")
            continue
        out.append((alias, target))
    out.sort()
    return tuple(out)


def detect_library_name(modules: Iterable[str], root: Path) -> str:
    tops = sorted({m.split(".")[0] for m in modules})
    if len(tops) == 1:
        return tops[0]
    return root.name


def extract_api(tree: SourceTree, library_version: str) -> tuple[ApiModel, ExtractReport]:
    """Parse every discovered file into one immutable ApiModel."""
    report = ExtractReport(root=str(tree.root))
    discovered = tree.discover()
    report.files_total = len(discovered)

    parsed_modules: list[_ParsedModule] = []
    seen: set[str] = set()
    for qname, path in discovered:
        if not all(is_identifier(seg) for seg in qname.split(".")):
            report.warn(str(path), f"skipped: not an importable module name: {qname}")
            continue
        if qname in seen:
            report.warn(str(path), f"skipped: duplicate module {qname}")
            continue
        parsed = _parse_module(qname, path, report)
        if parsed is None:
            continue
        seen.add(qname)
        parsed_modules.append(parsed)
    report.files_parsed = len(parsed_modules)

    defined: set[str] = set()
    for p in parsed_modules:
        defined.add(p.qname)
        for cls in p.classes:
            defined.add(cls.qname.render())
            for m in cls.methods:
                defined.add(m.qname.render())
        for fn in p.functions:
            defined.add(fn.qname.render())

    modules = tuple(
        ModuleInfo(
            qname=QualifiedName.parse(p.qname, KIND_MODULE),
            classes=tuple(p.classes),
            functions=tuple(p.functions),
            reexports=_resolve_reexports(p, defined, report),
        )
        for p in sorted(parsed_modules, key=lambda p: p.qname)
    )
    model = ApiModel(
        library_name=detect_library_name((p.qname for p in parsed_modules), tree.root),
        library_version=library_version,
        modules=modules,
    )
    model._index  # force duplicate validation before returning
    return model, report


def summarize_surface(model: ApiModel) -> SurfaceCounts:
    classes_total = classes_public = 0
    functions_total = functions_public = 0
    params_total = params_public = 0
    for cls in model.iter_classes():
        classes_total += 1
        classes_public += model.is_public(cls.qname.render())
    for fn in model.iter_callables():
        functions_total += 1
        functions_public += model.is_public(fn.qname.render())
    for text, _owner, _param in model.iter_parameters():
        params_total += 1
        params_public += model.is_public(text)
    return SurfaceCounts(
        classes_total, classes_public, functions_total, functions_public, params_total, params_public
    )
