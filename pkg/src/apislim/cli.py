"""Command-line entry point tying the pipeline together.

Exit codes: 0 success, 1 validation or diagnostic failure, 2 usage error.
With --json-errors, failures are written to stderr as JSON lines instead of
plain text, one object per diagnostic.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from . import __version__ as _tool_version
from .annotations import AnnotationSet, validate
from .classify import (
    DEFAULT_KEEP_NAMES,
    DEFAULT_SUFFIX_MAP,
    SCHEMA_CLASSIFICATION,
    SCHEMA_STATS,
    classify,
    reduction_stats,
    suggest_moves,
    suggest_removals,
)
from .evolution import diff_api, migrate_annotations, migration_to_json_dict
from .extractor import SourceTree, extract_api, summarize_surface
from .generator import GenerationError, generate
from .jsonutil import (
    SCHEMA_ANNOTATIONS,
    SCHEMA_API,
    SCHEMA_EXTRACT_REPORT,
    SCHEMA_GENERATED,
    SCHEMA_MIGRATION,
    SCHEMA_USAGES,
    dump_json,
    load_json,
)
from .miner import Corpus, mine, usages_from_json_dict, usages_to_json_dict
from .model import ApiModel

_ALL_SCHEMAS = (
    SCHEMA_API,
    SCHEMA_USAGES,
    SCHEMA_ANNOTATIONS,
    SCHEMA_CLASSIFICATION,
    SCHEMA_STATS,
    SCHEMA_MIGRATION,
    SCHEMA_EXTRACT_REPORT,
    SCHEMA_GENERATED,
)


class CliError(Exception):
    """Failure with one or more diagnostics; maps to exit code 1."""

    def __init__(self, diagnostics):
        if isinstance(diagnostics, str):
            diagnostics = [{"message": diagnostics}]
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d.get("message", "") for d in self.diagnostics))


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _suffix_pair(text: str) -> tuple[str, str]:
    suffix, sep, module = text.partition("=")
    if not sep or not suffix or not module:
        raise argparse.ArgumentTypeError("expected SUFFIX=MODULE")
    return suffix, module


def build_parser() -> argparse.ArgumentParser:
    # Shared flag usable both before and after the subcommand; SUPPRESS keeps
    # the subparser from clobbering a value parsed at the top level.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--json-errors",
        action="store_true",
        default=argparse.SUPPRESS,
        help="write failures to stderr as JSON lines",
    )
    parser = argparse.ArgumentParser(
        prog="apislim",
        description="Mine how a Python library is used and generate a slimmer wrapper API.",
        parents=[common],
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"apislim {_tool_version} (schemas: {', '.join(_ALL_SCHEMAS)})",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def add_command(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help_text, parents=[common])

    p = add_command("extract", "parse a library source tree into an API model")
    p.add_argument("root", help="library source root directory")
    p.add_argument("--version", dest="lib_version", metavar="V", required=True,
                   help="library version string recorded in the model")
    p.add_argument("-o", "--output", required=True, help="api model output path")
    p.add_argument("--exclude", action="append", default=[], metavar="GLOB",
                   help="relative path glob to skip (repeatable)")
    p.add_argument("--report", help="extract report path (default: sibling extract-report.json)")

    p = add_command("mine", "count API usages across a client corpus")
    p.add_argument("corpus", help="corpus root directory")
    p.add_argument("--api", required=True, help="api model path")
    p.add_argument("-o", "--output", required=True, help="usage counts output path")
    p.add_argument("--manifest", help="corpus manifest listing files to mine")
    p.add_argument("--jobs", type=_positive_int, default=1, help="parallel worker count")

    p = add_command("stats", "classify elements and report API reduction")
    p.add_argument("--api", required=True)
    p.add_argument("--usages", required=True)
    p.add_argument("-o", "--output", required=True, help="stats summary output path")
    p.add_argument("--markdown", help="also render the summary as a markdown table")
    p.add_argument("--classification", help="also write the per-element classification")

    p = add_command("suggest", "derive auto annotations from usage data")
    p.add_argument("--api", required=True)
    p.add_argument("--usages", required=True)
    p.add_argument("-o", "--output", required=True, help="annotation set output path")
    p.add_argument("--moves", action="store_true",
                   help="also suggest moves from class-name suffixes")
    p.add_argument("--keep", action="append", default=[], metavar="NAME",
                   help="extra function name to never suggest removing (repeatable)")
    p.add_argument("--map-suffix", action="append", default=[], type=_suffix_pair,
                   metavar="SUFFIX=MODULE", help="extra class-name suffix mapping (repeatable)")

    p = add_command("generate", "emit the adapted wrapper package")
    p.add_argument("--api", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("-o", "--output", required=True, help="directory to write the package into")
    p.add_argument("--package-name", help="generated package name (default: <library>_slim)")

    p = add_command("diff", "diff two model versions and migrate annotations")
    p.add_argument("--old", required=True, help="older api model path")
    p.add_argument("--new", required=True, help="newer api model path")
    p.add_argument("--annotations", help="annotation set to migrate")
    p.add_argument("-o", "--output", required=True, help="migration document output path")

    p = add_command("serve", "serve model, usages, and annotations over HTTP")
    p.add_argument("--api", required=True)
    p.add_argument("--usages", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--allow-origin", help="editor origin allowed for cross-origin requests")

    return parser


def _load_model(path: str) -> ApiModel:
    try:
        return ApiModel.from_json_dict(load_json(path))
    except FileNotFoundError:
        raise CliError(f"api model not found: {path}")
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"not a valid api model: {path}: {exc}")


def _load_usages(path: str):
    try:
        return usages_from_json_dict(load_json(path))
    except FileNotFoundError:
        raise CliError(f"usage counts not found: {path}")
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"not a valid usage document: {path}: {exc}")


def _load_annotations(path: str) -> AnnotationSet:
    try:
        return AnnotationSet.from_json_dict(load_json(path))
    except FileNotFoundError:
        raise CliError(f"annotation set not found: {path}")
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"not a valid annotation set: {path}: {exc}")


def _ensure_parent(path: str) -> None:
    parent = Path(path).resolve().parent
    parent.mkdir(parents=True, exist_ok=True)


def _write(data: dict, path: str) -> None:
    _ensure_parent(path)
    dump_json(data, path)


def _cmd_extract(args) -> int:
    try:
        tree = SourceTree.at(args.root, exclude=tuple(args.exclude))
    except (FileNotFoundError, NotADirectoryError) as exc:
        raise CliError(str(exc))
    model, report = extract_api(tree, args.lib_version)
    _write(model.to_json_dict(), args.output)
    report_path = args.report or str(Path(args.output).parent / "extract-report.json")
    _write(report.to_json_dict(), report_path)
    surface = summarize_surface(model)
    print(
        f"wrote {args.output}: {len(model.modules)} modules, "
        f"{surface.classes_total} classes, {surface.functions_total} callables "
        f"({len(report.warnings)} warnings in {report_path})"
    )
    return 0


def _cmd_mine(args) -> int:
    model = _load_model(args.api)
    try:
        corpus = Corpus.at(args.corpus, manifest_path=args.manifest)
        counts, report, lints = mine(corpus, model, jobs=args.jobs)
    except (FileNotFoundError, NotADirectoryError, KeyError, ValueError) as exc:
        raise CliError(str(exc))
    _write(usages_to_json_dict(model, counts, report, lints), args.output)
    print(
        f"wrote {args.output}: {report.files_using_library}/{report.files_total} files "
        f"use {model.library_name}, {report.files_skipped} skipped, {len(lints)} lints"
    )
    return 0


def _classify_inputs(api_path: str, usages_path: str):
    model = _load_model(api_path)
    library, counts, _report, _lints = _load_usages(usages_path)
    try:
        report = classify(model, counts, library)
    except ValueError as exc:
        raise CliError(str(exc))
    return model, counts, report


def _cmd_stats(args) -> int:
    model, _counts, report = _classify_inputs(args.api, args.usages)
    summary = reduction_stats(report, summarize_surface(model))
    _write(summary.to_json_dict(), args.output)
    if args.markdown:
        _ensure_parent(args.markdown)
        Path(args.markdown).write_text(summary.to_markdown(), encoding="utf-8")
    if args.classification:
        _write(report.to_json_dict(), args.classification)
    for kind in (summary.classes, summary.functions, summary.parameters):
        print(
            f"{kind.kind}: {kind.public} public, {kind.kept} kept, "
            f"reduction {kind.reduction} ({kind.reduction_percent}%)"
        )
    return 0


def _cmd_suggest(args) -> int:
    model, _counts, report = _classify_inputs(args.api, args.usages)
    keep = DEFAULT_KEEP_NAMES | frozenset(args.keep)
    suggestions = list(suggest_removals(report, keep_names=keep).annotations)
    if args.moves:
        suffix_map = dict(DEFAULT_SUFFIX_MAP)
        suffix_map.update(dict(args.map_suffix))
        suggestions.extend(suggest_moves(model, suffix_map).annotations)
    auto = AnnotationSet.build(model.library_name, model.library_version, suggestions)
    result = validate(auto, model, report)
    if not result.ok:
        raise CliError([d.to_json() for d in result.errors])
    _write(auto.to_json_dict(), args.output)
    print(f"wrote {args.output}: {len(auto.annotations)} suggestions")
    return 0


def _cmd_generate(args) -> int:
    model = _load_model(args.api)
    aset = _load_annotations(args.annotations)
    if aset.library_name != model.library_name:
        raise CliError(
            f"annotations are for {aset.library_name}, model is {model.library_name}"
        )
    result = validate(aset, model)
    if not result.ok:
        raise CliError([d.to_json() for d in result.errors])
    try:
        source = generate(model, aset, args.package_name)
    except GenerationError as exc:
        raise CliError(str(exc))
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    source.write_to(out_dir)
    print(f"wrote {len(source.files)} files under {out_dir / source.package_name}")
    return 0


def _cmd_diff(args) -> int:
    old = _load_model(args.old)
    new = _load_model(args.new)
    try:
        diff = diff_api(old, new)
    except ValueError as exc:
        raise CliError(str(exc))
    migrated = report = None
    if args.annotations:
        aset = _load_annotations(args.annotations)
        if aset.library_name != old.library_name:
            raise CliError(
                f"annotations are for {aset.library_name}, models are {old.library_name}"
            )
        migrated, report = migrate_annotations(aset, diff)
    _write(migration_to_json_dict(diff, migrated, report), args.output)
    line = (
        f"wrote {args.output}: +{len(diff.added)} -{len(diff.removed)} "
        f"~{len(diff.signature_changed)} signatures, {len(diff.deprecated)} deprecations"
    )
    if report is not None:
        line += f"; migrated {len(migrated.annotations)}, dropped {len(report.dropped)}"
    print(line)
    return 0


def _cmd_serve(args) -> int:
    from .service import serve

    try:
        serve(
            args.api,
            args.usages,
            args.annotations,
            port=args.port,
            allow_origin=args.allow_origin,
            host=args.host,
        )
    except (FileNotFoundError, KeyError, TypeError, ValueError) as exc:
        raise CliError(str(exc))
    return 0


_COMMANDS = {
    "extract": _cmd_extract,
    "mine": _cmd_mine,
    "stats": _cmd_stats,
    "suggest": _cmd_suggest,
    "generate": _cmd_generate,
    "diff": _cmd_diff,
    "serve": _cmd_serve,
}


def _emit_errors(diagnostics, as_json: bool) -> None:
    for diag in diagnostics:
        if as_json:
            sys.stderr.write(json.dumps(diag, sort_keys=True) + "\n")
        else:
            target = diag.get("target")
            prefix = f"{target}: " if target else ""
            sys.stderr.write(f"error: {prefix}{diag.get('message', '')}\n")


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        return _COMMANDS[args.command](args)
    except CliError as exc:
        _emit_errors(exc.diagnostics, getattr(args, "json_errors", False))
        return 1


if __name__ == "__main__":
    sys.exit(main())
