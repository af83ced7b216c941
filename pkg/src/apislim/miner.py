"""Mine a corpus of client programs for call sites against an ApiModel.

Resolution is deliberately shallow: exact import-based paths first, then a
single-scope receiver heuristic for method calls on variables assigned from
a constructor call. No dataflow crosses a function boundary. Star imports
and attribute-stored receivers are not tracked.
"""

from __future__ import annotations

import ast
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .extractor import literal_from_expr
from .jsonutil import SCHEMA_USAGES, load_json
from .model import (
    ApiModel,
    Callable,
    ClassInfo,
    LiteralValue,
    ModuleInfo,
    PARAM_SEP,
    POSITIONAL_ONLY,
    POSITIONAL_OR_KEYWORD,
    VAR_KEYWORD,
    VAR_POSITIONAL,
)

# ---------------------------------------------------------------------------
# Corpus discovery
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Corpus:
    """A directory of client programs, optionally narrowed by a manifest."""

    root: Path
    manifest: Optional[tuple[dict, ...]] = None

    @staticmethod
    def at(root: str | Path, manifest_path: Optional[str | Path] = None) -> "Corpus":
        root = Path(root)
        manifest = None
        if manifest_path is not None:
            doc = load_json(manifest_path)
            entries = doc["files"] if isinstance(doc, dict) else doc
            manifest = tuple(
                {"path": e["path"], "tag": e.get("tag")} for e in entries
            )
        return Corpus(root=root, manifest=manifest)

    def discover(self) -> list[Path]:
        if not self.root.is_dir():
            raise FileNotFoundError(f"corpus root not found: {self.root}")
        if self.manifest is not None:
            paths = []
            for entry in self.manifest:
                path = self.root / entry["path"]
                if not path.is_file():
                    raise FileNotFoundError(f"manifest path missing under root: {entry['path']}")
                paths.append(path)
            return sorted(paths)
        found = []
        for pattern in ("*.py", "*.ipynb"):
            for path in self.root.rglob(pattern):
                rel_parts = path.relative_to(self.root).parts
                if any(p.startswith(".") or p == "__pycache__" for p in rel_parts[:-1]):
                    continue
                found.append(path)
        return sorted(found)


def read_program(path: Path) -> str:
    """File content as Python source; notebooks become one synthetic program."""
    text = path.read_text(encoding="utf-8")
    if path.suffix != ".ipynb":
        return text
    notebook = json.loads(text)
    chunks = []
    for cell in notebook.get("cells", ()):
        if cell.get("cell_type") != "code":
            continue
        source = cell.get("source", "")
        if isinstance(source, list):
            source = "".join(source)
        lines = [ln for ln in source.splitlines() if not ln.lstrip().startswith(("%", "!"))]
        chunks.append("\n".join(lines))
    return "\n\n".join(chunks)


# ---------------------------------------------------------------------------
# Import tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ImportTable:
    """Local name -> qname text, for names rooted at the target library."""

    entries: dict[str, str]

    def get(self, name: str) -> Optional[str]:
        return self.entries.get(name)


def build_import_table(tree: ast.Module, library_name: str) -> ImportTable:
    nodes = [n for n in ast.walk(tree) if isinstance(n, (ast.Import, ast.ImportFrom))]
    nodes.sort(key=lambda n: (n.lineno, n.col_offset))
    entries: dict[str, str] = {}
    for node in nodes:
        if isinstance(node, ast.Import):
            for alias in node.names:
                root = alias.name.split(".")[0]
                if root != library_name:
                    continue
                if alias.asname:
                    entries[alias.asname] = alias.name
                else:
                    entries[root] = root
        else:
            if node.level > 0 or not node.module:
                continue
            if node.module.split(".")[0] != library_name:
                continue
            for alias in node.names:
                if alias.name == "*":
                    continue
                entries[alias.asname or alias.name] = f"{node.module}.{alias.name}"
    return ImportTable(entries)


# ---------------------------------------------------------------------------
# Usage accumulation
# ---------------------------------------------------------------------------


@dataclass
class UsageCounts:
    """Aggregated per-element usage; merge is commutative and associative."""

    classes: dict[str, dict] = field(default_factory=dict)
    callables: dict[str, dict] = field(default_factory=dict)
    parameters: dict[str, dict] = field(default_factory=dict)

    def class_entry(self, text: str) -> dict:
        return self.classes.setdefault(text, {"count": 0, "constructor_count": 0})

    def callable_entry(self, text: str) -> dict:
        return self.callables.setdefault(text, {"count": 0, "opaque_count": 0})

    def parameter_entry(self, text: str) -> dict:
        return self.parameters.setdefault(text, {"explicit_count": 0, "values": {}})

    def merge(self, other: "UsageCounts") -> "UsageCounts":
        out = UsageCounts(
            classes={k: dict(v) for k, v in self.classes.items()},
            callables={k: dict(v) for k, v in self.callables.items()},
            parameters={k: {"explicit_count": v["explicit_count"], "values": dict(v["values"])}
                        for k, v in self.parameters.items()},
        )
        for text, use in other.classes.items():
            entry = out.class_entry(text)
            entry["count"] += use["count"]
            entry["constructor_count"] += use["constructor_count"]
        for text, use in other.callables.items():
            entry = out.callable_entry(text)
            entry["count"] += use["count"]
            entry["opaque_count"] += use["opaque_count"]
        for text, use in other.parameters.items():
            entry = out.parameter_entry(text)
            entry["explicit_count"] += use["explicit_count"]
            for value_text, n in use["values"].items():
                entry["values"][value_text] = entry["values"].get(value_text, 0) + n
        return out

    def to_json_fragment(self) -> dict:
        return {
            "classes": self.classes,
            "callables": self.callables,
            "parameters": self.parameters,
        }

    @staticmethod
    def from_json_fragment(data: dict) -> "UsageCounts":
        return UsageCounts(
            classes={k: dict(v) for k, v in data["classes"].items()},
            callables={k: dict(v) for k, v in data["callables"].items()},
            parameters={
                k: {"explicit_count": v["explicit_count"], "values": dict(v["values"])}
                for k, v in data["parameters"].items()
            },
        )


@dataclass
class MiningReport:
    files_total: int = 0
    files_using_library: int = 0
    files_skipped: int = 0

    def to_json_dict(self) -> dict:
        return {
            "files_total": self.files_total,
            "files_using_library": self.files_using_library,
            "files_skipped": self.files_skipped,
        }


# ---------------------------------------------------------------------------
# Per-file mining
# ---------------------------------------------------------------------------

_CTOR = "ctor"
_CALLABLE = "callable"


@dataclass
class _Resolution:
    kind: str  # _CTOR or _CALLABLE
    class_text: Optional[str]
    callable: Optional[Callable]  # None only for constructor-less classes


class _FileMiner:
    def __init__(self, model: ApiModel, table: ImportTable, file_label: str):
        self.model = model
        self.table = table
        self.file = file_label
        self.counts = UsageCounts()
        self.lints: list[dict] = []
        self.saw_use = False

    # -- resolution ---------------------------------------------------------

    def _dotted_parts(self, node: ast.expr) -> Optional[list[str]]:
        parts: list[str] = []
        while isinstance(node, ast.Attribute):
            parts.append(node.attr)
            node = node.value
        if isinstance(node, ast.Name):
            parts.append(node.id)
            parts.reverse()
            return parts
        return None

    def _resolution_for_element(self, text: str, element) -> Optional[_Resolution]:
        if isinstance(element, ClassInfo):
            return _Resolution(_CTOR, text, element.constructor)
        if isinstance(element, Callable):
            owner = self.model.class_of(text)
            return _Resolution(_CALLABLE, owner.qname.render() if owner else None, element)
        return None  # modules and parameters are not callable targets

    def resolve_call(self, node: ast.Call, env: dict[str, str]) -> Optional[_Resolution]:
        func = node.func
        # Tier 1: imported name or dotted path rooted at an imported name.
        parts = self._dotted_parts(func)
        if parts is not None:
            rooted = self.table.get(parts[0])
            if rooted is not None:
                text = ".".join([rooted] + parts[1:])
                resolved = self.model.resolve_text(text)
                if resolved is not None:
                    return self._resolution_for_element(*resolved)
        # Tier 2: method call on a variable assigned from a constructor call.
        if isinstance(func, ast.Attribute):
            recv = func.value
            class_text: Optional[str] = None
            if isinstance(recv, ast.Name) and recv.id in env:
                class_text = env[recv.id]
            elif isinstance(recv, ast.Call):
                inner = self.resolve_call(recv, env)
                if inner is not None and inner.kind == _CTOR:
                    class_text = inner.class_text
            if class_text is not None:
                element = self.model.lookup(class_text)
                if isinstance(element, ClassInfo):
                    for method in element.methods:
                        if method.name == func.attr:
                            return _Resolution(_CALLABLE, class_text, method)
        return None

    # -- binding ------------------------------------------------------------

    def bind_arguments(
        self, node: ast.Call, target: Callable
    ) -> tuple[dict[str, tuple[LiteralValue, bool]], bool, Optional[str]]:
        """(bindings, opaque, lint message). Opaque events carry no bindings."""
        if any(isinstance(a, ast.Starred) for a in node.args) or any(
            kw.arg is None for kw in node.keywords
        ):
            return {}, True, None

        params = target.parameters
        has_var_pos = any(p.assignment_kind == VAR_POSITIONAL for p in params)
        has_var_kw = any(p.assignment_kind == VAR_KEYWORD for p in params)
        positional = [
            p for p in params if p.assignment_kind in (POSITIONAL_ONLY, POSITIONAL_OR_KEYWORD)
        ]

        bound: dict[str, tuple[LiteralValue, bool]] = {}

        def value_of(expr: ast.expr) -> LiteralValue:
            literal = literal_from_expr(expr)
            return literal if literal is not None else LiteralValue.dynamic()

        if len(node.args) > len(positional) and not has_var_pos:
            return {}, True, f"too many positional arguments for {target.qname.render()}"
        for index, arg in enumerate(node.args):
            if index < len(positional):
                bound[positional[index].name] = (value_of(arg), True)
        for kw in node.keywords:
            param = target.parameter(kw.arg)
            if param is None or param.is_variadic or param.assignment_kind == POSITIONAL_ONLY:
                if has_var_kw:
                    continue
                return {}, True, f"unknown keyword {kw.arg!r} for {target.qname.render()}"
            if param.name in bound:
                return {}, True, f"duplicate argument {kw.arg!r} for {target.qname.render()}"
            bound[param.name] = (value_of(kw.value), True)
        for param in params:
            if param.is_variadic or param.name in bound:
                continue
            if param.default is not None:
                bound[param.name] = (param.default, False)
            else:
                return {}, True, f"missing required argument {param.name!r} for {target.qname.render()}"
        return bound, False, None

    # -- event recording ----------------------------------------------------

    def lint(self, node: ast.AST, message: str) -> None:
        self.lints.append({"file": self.file, "line": getattr(node, "lineno", 0), "message": message})

    def handle_call(self, node: ast.Call, env: dict[str, str]) -> None:
        resolution = self.resolve_call(node, env)
        if resolution is None:
            return
        self.saw_use = True

        if resolution.callable is None:
            # Constructor-less class: the instantiation still counts as a use.
            entry = self.counts.class_entry(resolution.class_text)
            entry["count"] += 1
            entry["constructor_count"] += 1
            if node.args or node.keywords:
                self.lint(node, f"arguments to {resolution.class_text} have no modeled constructor")
            return

        target = resolution.callable
        target_text = target.qname.render()
        bindings, opaque, note = self.bind_arguments(node, target)
        if note is not None:
            self.lint(node, note)

        entry = self.counts.callable_entry(target_text)
        entry["count"] += 1
        if opaque:
            entry["opaque_count"] += 1
        if resolution.class_text is not None:
            class_entry = self.counts.class_entry(resolution.class_text)
            class_entry["count"] += 1
            if target.is_constructor:
                class_entry["constructor_count"] += 1
        for name, (value, explicit) in bindings.items():
            param_entry = self.counts.parameter_entry(target_text + PARAM_SEP + name)
            param_entry["values"][value.text] = param_entry["values"].get(value.text, 0) + 1
            if explicit:
                param_entry["explicit_count"] += 1

    # -- ordered scope walk ---------------------------------------------------

    def run(self, tree: ast.Module) -> None:
        self.exec_body(tree.body, {})

    def exec_body(self, body: Iterable[ast.stmt], env: dict[str, str]) -> None:
        for stmt in body:
            self.exec_stmt(stmt, env)

    def _clear_target(self, target: ast.expr, env: dict[str, str]) -> None:
        for node in ast.walk(target):
            if isinstance(node, ast.Name):
                env.pop(node.id, None)

    def _ctor_class_of(self, expr: ast.expr, env: dict[str, str]) -> Optional[str]:
        if isinstance(expr, ast.Call):
            resolution = self.resolve_call(expr, env)
            if resolution is not None and resolution.kind == _CTOR:
                return resolution.class_text
        return None

    def scan_expr(self, expr: Optional[ast.expr], env: dict[str, str]) -> None:
        if expr is None:
            return
        for node in ast.walk(expr):
            if isinstance(node, ast.Call):
                self.handle_call(node, env)

    def exec_stmt(self, stmt: ast.stmt, env: dict[str, str]) -> None:
        if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
            for deco in stmt.decorator_list:
                self.scan_expr(deco, env)
            for default in list(stmt.args.defaults) + [d for d in stmt.args.kw_defaults if d]:
                self.scan_expr(default, env)
            self.exec_body(stmt.body, {})  # fresh scope: receivers do not leak in
        elif isinstance(stmt, ast.ClassDef):
            for deco in stmt.decorator_list:
                self.scan_expr(deco, env)
            for base in stmt.bases:
                self.scan_expr(base, env)
            for kw in stmt.keywords:
                self.scan_expr(kw.value, env)
            self.exec_body(stmt.body, {})
        elif isinstance(stmt, ast.Assign):
            self.scan_expr(stmt.value, env)
            class_text = self._ctor_class_of(stmt.value, env)
            for target in stmt.targets:
                if isinstance(target, ast.Name):
                    if class_text is not None:
                        env[target.id] = class_text
                    else:
                        env.pop(target.id, None)
                else:
                    self._clear_target(target, env)
        elif isinstance(stmt, ast.AnnAssign):
            self.scan_expr(stmt.value, env)
            if isinstance(stmt.target, ast.Name):
                class_text = self._ctor_class_of(stmt.value, env) if stmt.value else None
                if class_text is not None:
                    env[stmt.target.id] = class_text
                else:
                    env.pop(stmt.target.id, None)
            else:
                self._clear_target(stmt.target, env)
        elif isinstance(stmt, ast.AugAssign):
            self.scan_expr(stmt.value, env)
            self._clear_target(stmt.target, env)
        elif isinstance(stmt, ast.Delete):
            for target in stmt.targets:
                self._clear_target(target, env)
        elif isinstance(stmt, (ast.For, ast.AsyncFor)):
            self.scan_expr(stmt.iter, env)
            self._clear_target(stmt.target, env)
            self.exec_body(stmt.body, env)
            self.exec_body(stmt.orelse, env)
        elif isinstance(stmt, ast.While):
            self.scan_expr(stmt.test, env)
            self.exec_body(stmt.body, env)
            self.exec_body(stmt.orelse, env)
        elif isinstance(stmt, ast.If):
            self.scan_expr(stmt.test, env)
            self.exec_body(stmt.body, env)
            self.exec_body(stmt.orelse, env)
        elif isinstance(stmt, (ast.With, ast.AsyncWith)):
            for item in stmt.items:
                self.scan_expr(item.context_expr, env)
                if item.optional_vars is not None:
                    self._clear_target(item.optional_vars, env)
            self.exec_body(stmt.body, env)
        elif isinstance(stmt, ast.Try):
            self.exec_body(stmt.body, env)
            for handler in stmt.handlers:
                self.scan_expr(handler.type, env)
                self.exec_body(handler.body, env)
            self.exec_body(stmt.orelse, env)
            self.exec_body(stmt.finalbody, env)
        else:
            for child in ast.iter_child_nodes(stmt):
                if isinstance(child, ast.expr):
                    self.scan_expr(child, env)


def mine_source(source: str, model: ApiModel, file_label: str) -> _FileMiner:
    """Mine one program text; raises SyntaxError for unparseable input."""
    tree = ast.parse(source)
    miner = _FileMiner(model, build_import_table(tree, model.library_name), file_label)
    miner.run(tree)
    return miner


# ---------------------------------------------------------------------------
# Corpus-level mining
# ---------------------------------------------------------------------------

_worker_model: Optional[ApiModel] = None


def _init_worker(model: ApiModel) -> None:
    global _worker_model
    _worker_model = model


def _mine_file_task(args: tuple[str, str]) -> tuple[dict, list[dict], bool, bool, Optional[dict]]:
    root_text, rel_text = args
    return _mine_one_file(Path(root_text), rel_text, _worker_model)


def _mine_one_file(
    root: Path, rel_text: str, model: ApiModel
) -> tuple[dict, list[dict], bool, bool, Optional[dict]]:
    """(counts fragment, lints, used, skipped, skip lint) for one corpus file."""
    path = root / rel_text
    try:
        source = read_program(path)
        miner = mine_source(source, model, rel_text)
    except (SyntaxError, UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError) as exc:
        note = {"file": rel_text, "line": 0, "message": f"skipped: {exc.__class__.__name__}: {exc}"}
        return {}, [], False, True, note
    return miner.counts.to_json_fragment(), miner.lints, miner.saw_use, False, None


def mine(corpus: Corpus, model: ApiModel, jobs: int = 1) -> tuple[UsageCounts, MiningReport, list[dict]]:
    """Aggregate usage over the corpus. Deterministic for any jobs value."""
    files = corpus.discover()
    rels = [p.relative_to(corpus.root).as_posix() for p in files]
    report = MiningReport(files_total=len(files))
    totals = UsageCounts()
    lints: list[dict] = []

    if jobs > 1 and len(rels) > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=(model,)) as pool:
            results = list(pool.map(_mine_file_task, [(str(corpus.root), r) for r in rels]))
    else:
        results = [_mine_one_file(corpus.root, rel, model) for rel in rels]

    for fragment, file_lints, used, skipped, note in results:
        if skipped:
            report.files_skipped += 1
            if note is not None:
                lints.append(note)
            continue
        if used:
            report.files_using_library += 1
        if fragment:
            totals = totals.merge(UsageCounts.from_json_fragment(fragment))
        lints.extend(file_lints)

    lints.sort(key=lambda l: (l["file"], l["line"], l["message"]))
    return totals, report, lints


def usages_to_json_dict(
    model: ApiModel, counts: UsageCounts, report: MiningReport, lints: list[dict]
) -> dict:
    doc = {
        "schema": SCHEMA_USAGES,
        "library": {"name": model.library_name, "version": model.library_version},
        "report": report.to_json_dict(),
        "lints": lints,
    }
    doc.update(counts.to_json_fragment())
    return doc


def usages_from_json_dict(data: dict) -> tuple[dict, UsageCounts, MiningReport, list[dict]]:
    counts = UsageCounts.from_json_fragment(data)
    rep = data.get("report", {})
    report = MiningReport(
        files_total=rep.get("files_total", 0),
        files_using_library=rep.get("files_using_library", 0),
        files_skipped=rep.get("files_skipped", 0),
    )
    return data["library"], counts, report, list(data.get("lints", ()))
