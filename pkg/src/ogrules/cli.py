"""Command-line entry point: ``ogrules <subcommand> ...``.

Exit codes: 0 on success, 1 on domain errors (reported on stderr as
``ERROR:<code>: message``), 2 on usage errors.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import dpo, enumeration, matcher, overlay, substrate
from .chemgraph import GraphError
from .molparse import (
    DocumentError, SmilesError, dumps, load_json, mixture_to_doc, parse_smiles, read_mechanism,
    read_mixture, read_og, read_reaction_sequence, read_rule, write_og, write_rule,
)

BOND_COLORS = {
    overlay.BondClass.FORMED: "green",
    overlay.BondClass.BROKEN: "red",
    overlay.BondClass.CONTEXT: "gray",
    overlay.BondClass.TRANSIENT_MODIFIED: "black",
    overlay.BondClass.TRANSIENT_FORMED: "blue",
}
ATOM_COLORS = {"created": "green", "deleted": "red"}

# most specific first: the first matching class names the error
ERROR_CODES = (
    (enumeration.ContradictoryPinError, "contradictory_pin"),
    (enumeration.SequenceError, "sequence_error"),
    (dpo.InconsistentDeltaError, "inconsistent_delta"),
    (dpo.ChainBreakError, "chain_break"),
    (dpo.InvalidMatchError, "invalid_match"),
    (dpo.RuleError, "rule_error"),
    (overlay.CompositionError, "composition_error"),
    (substrate.CatalystError, "catalyst_error"),
    (SmilesError, "smiles_error"),
    (DocumentError, "document_error"),
    (GraphError, "graph_error"),
    (OSError, "io_error"),
    (ValueError, "invalid_input"),
)


class CliError(Exception):
    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_bytes(text.encode("utf-8"))


def _load(path):
    try:
        return load_json(path)
    except ValueError as exc:
        raise CliError("json_error", f"{path}: {exc}") from None


# -- DOT ------------------------------------------------------------------------

def _atom_text(label) -> str:
    if label is None:
        return ""
    el, ch = label
    if not ch:
        return el
    sign = "+" if ch > 0 else "-"
    return el + (sign if abs(ch) == 1 else f"{abs(ch)}{sign}")


def render_dot(og: overlay.OverlayGraph, collapse_h: bool = False) -> str:
    """DOT text for an overlay graph, coloured by bond class."""
    hidden = set()
    if collapse_h:
        busy = {v for b in og.bonds if b.bond_class != overlay.BondClass.CONTEXT for v in b.pair}
        for a in og.atoms:
            el = (a.start or a.end)[0]
            if el == "H" and a.id not in busy and a.substrate_flag is None and a.start == a.end:
                hidden.add(a.id)
    lines = ["graph og {", "  node [shape=circle];"]
    for a in og.atoms:
        if a.id in hidden:
            continue
        start, end = _atom_text(a.start), _atom_text(a.end)
        text = start if start == end else f"{start or '-'}/{end or '-'}"
        attrs = [f'label="{text}"']
        if a.substrate_flag in ATOM_COLORS:
            attrs += [f"color={ATOM_COLORS[a.substrate_flag]}", "penwidth=2"]
        lines.append(f"  a{a.id} [{', '.join(attrs)}];")
    for b in og.bonds:
        if b.pair[0] in hidden or b.pair[1] in hidden:
            continue
        attrs = [f"color={BOND_COLORS[b.bond_class]}"]
        if b.start_order != b.end_order:
            attrs.append(f'label="{b.start_order}:{b.end_order}"')
        if b.bond_class in overlay.ACTION_CLASSES:
            attrs.append("penwidth=2")
        if b.bond_class == overlay.BondClass.TRANSIENT_FORMED:
            attrs.append("style=dashed")
        lines.append(f"  a{b.pair[0]} -- a{b.pair[1]} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- subcommands --------------------------------------------------------------------

def cmd_parse(args) -> None:
    if args.smiles is not None:
        g = parse_smiles(args.smiles)
    else:
        g = read_mixture(_load(args.json))
    _write(dumps(mixture_to_doc(g)), args.out)


def cmd_overlay(args) -> None:
    mech = read_mechanism(_load(args.mech))
    rule, _ = overlay.overlay_rule(mech)
    _write(write_rule(rule, substrate=False), args.rule)
    if args.og:
        _write(write_og(overlay.build_og(mech)), args.og)


def _read_overlap(path) -> dict[int, int]:
    doc = _load(path)
    if isinstance(doc, dict):
        doc = doc.get("pairs", doc)
    if isinstance(doc, dict):
        return {int(k): int(v) for k, v in doc.items()}
    try:
        return {int(a): int(b) for a, b in doc}
    except (TypeError, ValueError):
        raise CliError("document_error", "overlap must be a list of [r1_atom, r2_atom] pairs") from None


def cmd_compose(args) -> None:
    if len(args.rule) != 2:
        raise CliError("usage", "compose needs exactly two --rule arguments")
    r1, r2 = (read_rule(_load(p)) for p in args.rule)
    overlap = _read_overlap(args.overlap) if args.overlap else {}
    rule = overlay.compose_rules_with_overlap(r1, r2, overlap)
    _write(write_rule(rule), args.out)


def cmd_substrate(args) -> None:
    mech = read_mechanism(_load(args.mech))
    if args.catalysts.lower() == "auto":
        cats = "auto"
    else:
        try:
            cats = [int(x) for x in args.catalysts.split(",") if x.strip()]
        except ValueError:
            raise CliError("usage", "--catalysts takes AUTO or a comma-separated index list") from None
    rule, ca = substrate.substrate_rule_of(mech, cats)
    if ca is None:
        print("no catalytic component found; writing the full overlay rule", file=sys.stderr)
    _write(write_rule(rule, substrate=True), args.out)
    if args.og:
        _write(write_og(overlay.og_from_rule(rule, substrate=True)), args.og)


def _read_pins(path) -> list[tuple[int, int, int]]:
    doc = _load(path)
    if isinstance(doc, dict):
        doc = doc.get("pins", doc.get("partial_links", []))
    pins = []
    for item in doc:
        if isinstance(item, dict):
            try:
                pins.append((item["step_index"], item["product_atom"], item["next_educt_atom"]))
            except KeyError as exc:
                raise CliError("document_error", f"pin lacks {exc.args[0]!r}") from None
        else:
            pins.append(tuple(item))
    return pins


def cmd_enumerate(args) -> None:
    seq = read_reaction_sequence(_load(args.seq))
    if args.pins:
        seq = enumeration.apply_partial_map(seq, _read_pins(args.pins))
    res = enumeration.enumerate_overlays(seq)
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    width = max(3, len(str(len(res.overlay_rules))))
    for k, rule in enumerate(res.overlay_rules):
        _write(write_rule(rule), str(out / f"overlay_{k:0{width}d}.rule.json"))
    _write(dumps(res.summary()), str(out / "summary.json"))


def cmd_match(args) -> None:
    rules = matcher.load_rules(args.rules)
    corpus = matcher.read_corpus(args.corpus)
    report = matcher.batch_match(rules, corpus, jobs=args.jobs, timeout=args.timeout)
    _write(report.to_tsv(), args.report)
    summary = args.summary
    if summary is None and args.report not in (None, "-"):
        summary = str(Path(args.report).with_suffix(".summary.json"))
    if summary:
        _write(report.summary_json(), summary)


def cmd_classify(args) -> None:
    named = matcher.load_rules(args.rules)
    res = matcher.classify_rules([r for _, r in named])
    names = [n for n, _ in named]
    doc = {
        "classes": [[names[i] for i in cls] for cls in res.classes],
        "refinements": [[names[res.classes[a][0]], names[res.classes[b][0]]] for a, b in res.edges],
    }
    _write(dumps(doc), args.out)


def cmd_render(args) -> None:
    og = read_og(_load(args.og))
    _write(render_dot(og, collapse_h=args.collapse_h), args.dot)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ogrules", description="Overlay rules for reaction mechanisms.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("parse", help="SMILES or mixture JSON to normalized mixture JSON")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--smiles")
    src.add_argument("--json")
    s.add_argument("--out")
    s.set_defaults(func=cmd_parse)

    s = sub.add_parser("overlay", help="overlay rule and OG of a mechanism")
    s.add_argument("--mech", required=True)
    s.add_argument("--rule", required=True)
    s.add_argument("--og")
    s.set_defaults(func=cmd_overlay)

    s = sub.add_parser("compose", help="compose two rules along an atom overlap")
    s.add_argument("--rule", action="append", required=True)
    s.add_argument("--overlap")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_compose)

    s = sub.add_parser("substrate", help="most condensed substrate rule of a mechanism")
    s.add_argument("--mech", required=True)
    s.add_argument("--catalysts", default="auto")
    s.add_argument("--out", required=True)
    s.add_argument("--og")
    s.set_defaults(func=cmd_substrate)

    s = sub.add_parser("enumerate", help="all overlay rules of a reaction sequence")
    s.add_argument("--seq", required=True)
    s.add_argument("--outdir", required=True)
    s.add_argument("--pins")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("match", help="match rules against a reaction corpus")
    s.add_argument("--rules", required=True)
    s.add_argument("--corpus", required=True)
    s.add_argument("--report", required=True)
    s.add_argument("--summary")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--timeout", type=float, default=matcher.DEFAULT_TIMEOUT)
    s.set_defaults(func=cmd_match)

    s = sub.add_parser("classify", help="rule isomorphism classes and refinements")
    s.add_argument("--rules", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("render", help="DOT rendering of an OG")
    s.add_argument("--og", required=True)
    s.add_argument("--dot")
    s.add_argument("--collapse-h", action="store_true")
    s.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except CliError as exc:
        if exc.code == "usage":
            parser.print_usage(sys.stderr)
            print(f"ERROR:usage: {exc}", file=sys.stderr)
            return 2
        print(f"ERROR:{exc.code}: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - mapped to a code below or re-raised
        for cls, code in ERROR_CODES:
            if isinstance(exc, cls):
                print(f"ERROR:{code}: {exc}", file=sys.stderr)
                return 1
        raise
    return 0


if __name__ == "__main__":
    sys.exit(main())
