"""Command-line front end.

Exit status: 0 success (or valid), 1 a negative answer (invalid document,
or staged output under ``--fail-on-staged``), 2 any error.  Payload goes to
standard output, diagnostics to standard error.
"""

from __future__ import annotations

import argparse
import contextlib
import sys
from pathlib import Path

from .algebra import Atom, enumerate_members
from .errors import XtlError
from .expander import ExpansionSettings, expand_with_events
from .hedge import parse_xml, serialize_xml
from .repo import xml_repository
from .surface import parse_xtl, serialize_xtl
from .validator import explain, validate


def _read(path, preserve_space=False):
    return parse_xml(Path(path).read_bytes(), preserve_space=preserve_space)


def _emit(text, out_path, stdout):
    if out_path:
        Path(out_path).write_text(text + "\n", encoding="utf-8")
    else:
        stdout.write(text + "\n")


def _validate(args, stdout):
    entry, macros = parse_xtl(_read(args.schema))
    report = validate(entry, macros, _read(args.doc, args.preserve_space))
    if args.report:
        stdout.write(explain(report) + "\n")
    return 0 if report.valid else 1


def _expand(args, stdout):
    entry, macros = parse_xtl(_read(args.template))
    repo = xml_repository(_read(args.repo, args.preserve_space))
    settings = ExpansionSettings(
        max_macro_depth=args.max_macro_depth, staging_enabled=not args.strict
    )
    result, events = expand_with_events(entry, macros, repo, settings)
    _emit(serialize_xml(result), args.out, stdout)
    return 1 if events and args.fail_on_staged else 0


def _normalize(args, stdout):
    entry, macros = parse_xtl(_read(getattr(args, "in")))
    _emit(serialize_xml(serialize_xtl(entry, macros)), args.out, stdout)
    return 0


def _enumerate(args, stdout):
    entry, macros = parse_xtl(_read(args.schema))
    alphabet = [a for a in args.alphabet.split(",") if a]
    for member in enumerate_members(Atom(entry, macros), args.max_nodes, alphabet):
        stdout.write(serialize_xml(member) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xtl", description="Instantiate and validate XTL templates."
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("validate", help="check a document against an XTL schema")
    p.add_argument("--schema", required=True)
    p.add_argument("--doc", required=True)
    p.add_argument("--report", action="store_true", help="print a failure report")
    p.add_argument("--preserve-space", action="store_true")
    p.set_defaults(func=_validate)

    p = sub.add_parser("expand", help="fill a template from a repository")
    p.add_argument("--template", required=True)
    p.add_argument("--repo", required=True)
    p.add_argument("--out")
    p.add_argument("--strict", action="store_true", help="treat staging as an error")
    p.add_argument("--fail-on-staged", action="store_true",
                   help="exit 1 when the output still contains staged tags")
    p.add_argument("--preserve-space", action="store_true")
    p.add_argument("--max-macro-depth", type=int, default=256)
    p.set_defaults(func=_expand)

    p = sub.add_parser("normalize", help="rewrite an XTL file in canonical form")
    p.add_argument("--in", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_normalize)

    p = sub.add_parser("enumerate", help="list small members of a schema")
    p.add_argument("--schema", required=True)
    p.add_argument("--max-nodes", type=int, required=True)
    p.add_argument("--alphabet", required=True, help="comma-separated element names")
    p.set_defaults(func=_enumerate)
    return parser


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, stdout)
    except (XtlError, OSError, ValueError) as exc:
        stderr.write(f"xtl {args.command}: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
