"""Explaining overall reactions by a single rule application.

A rule explains ``E => P`` at a match ``m`` when applying it to ``E`` at ``m``
gives a mixture isomorphic to ``P``. Matches are enumerated on the educt side,
applied, and the products compared afterwards.
"""
from __future__ import annotations

import csv
import io
import json
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .chemgraph import Mixture, canonical_hash, is_isomorphic
from .dpo import Rule, apply, find_rule_matches, rule_embeddings, rule_hash, rules_isomorphic
from .overlay import action_size

DEFAULT_TIMEOUT = 10.0
REPORT_COLUMNS = ("reaction_id", "rule_id", "n_matches", "status")
NO_RULE = "-"


class MassBalanceWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Reaction:
    id: str
    educts: Mixture
    products: Mixture
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        charge = lambda g: sum(c for _, c in g.labels.values())  # noqa: E731
        elements = lambda g: sorted(e for e, _ in g.labels.values())  # noqa: E731
        if elements(self.educts) != elements(self.products) or charge(self.educts) != charge(self.products):
            warnings.warn(f"reaction {self.id} is not mass or charge balanced", MassBalanceWarning,
                          stacklevel=3)

    @property
    def label(self) -> str:
        return self.metadata.get("label", "")


@dataclass(frozen=True)
class ParseFailure:
    id: str
    error: str
    metadata: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        return self.metadata.get("label", "")


def match_reaction(rule: Rule, reaction: Reaction, deadline: float = 0.0) -> list[dict[int, int]]:
    """Matches of ``rule`` in the educts whose application yields the products."""
    target = reaction.products
    out = []
    for m in find_rule_matches(rule, reaction.educts, deadline=deadline):
        if deadline and time.monotonic() > deadline:
            raise TimeoutError("matching exceeded its deadline")
        result = apply(rule, reaction.educts, m, check=False).result
        if canonical_hash(result) == canonical_hash(target) and is_isomorphic(result, target):
            out.append(m)
    return out


def is_refinement(coarse: Rule, fine: Rule) -> bool:
    """Whether ``fine`` is ``coarse`` plus context: a rule-graph embedding onto the same action."""
    if action_size(coarse) != action_size(fine):
        return False
    if len(coarse.atom_ids()) > len(fine.atom_ids()):
        return False
    return bool(rule_embeddings(coarse, fine, limit=1))


def prune_refinements(rules: Sequence[Rule]) -> list[Rule]:
    """Drop every rule that refines another one; of isomorphic copies the first is kept."""
    keep = []
    for i, r in enumerate(rules):
        dominated = False
        for j, c in enumerate(rules):
            if i == j or not is_refinement(c, r):
                continue
            if not is_refinement(r, c) or j < i:
                dominated = True
                break
        if not dominated:
            keep.append(r)
    return keep


@dataclass(frozen=True)
class RuleClasses:
    classes: list
    edges: list

    def representatives(self) -> list[int]:
        return [c[0] for c in self.classes]


def classify_rules(rules: Sequence[Rule], with_refinements: bool = True) -> RuleClasses:
    """Rule-isomorphism classes (lists of input indices) and refinement edges between them.

    An edge ``(a, b)`` says the representative of class ``b`` refines that of
    class ``a``.
    """
    classes: list[list[int]] = []
    buckets: dict[str, list[int]] = {}
    for i, r in enumerate(rules):
        bucket = buckets.setdefault(rule_hash(r), [])
        for c in bucket:
            if rules_isomorphic(rules[classes[c][0]], r):
                classes[c].append(i)
                break
        else:
            bucket.append(len(classes))
            classes.append([i])
    edges = []
    if with_refinements:
        reps = [rules[c[0]] for c in classes]
        for a, ra in enumerate(reps):
            for b, rb in enumerate(reps):
                if a != b and is_refinement(ra, rb):
                    edges.append((a, b))
    return RuleClasses(classes, edges)


# -- batch matching -----------------------------------------------------------------

@dataclass(frozen=True)
class MatchRow:
    reaction_id: str
    rule_id: str
    n_matches: int
    status: str
    timed_out: bool = False


@dataclass
class MatchReport:
    rows: list
    summary: dict

    def to_tsv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, delimiter="\t", lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for r in self.rows:
            w.writerow((r.reaction_id, r.rule_id, r.n_matches, r.status))
        return buf.getvalue()

    def summary_json(self) -> str:
        return json.dumps(self.summary, sort_keys=True, indent=2) + "\n"

    def matched_reactions(self) -> set[str]:
        return {r.reaction_id for r in self.rows if r.status == "matched"}


def _match_one(rule_id: str, rule: Rule, reaction: Reaction, timeout: float) -> MatchRow:
    deadline = time.monotonic() + timeout if timeout and timeout > 0 else 0.0
    try:
        n = len(match_reaction(rule, reaction, deadline))
    except TimeoutError:
        return MatchRow(reaction.id, rule_id, 0, "no_match", True)
    return MatchRow(reaction.id, rule_id, n, "matched" if n else "no_match")


def _match_chunk(args) -> list[MatchRow]:
    rules, reaction, timeout = args
    return [_match_one(rid, r, reaction, timeout) for rid, r in rules]


def batch_match(rules: Mapping[str, Rule] | Sequence[tuple[str, Rule]],
                reactions: Iterable[Reaction | ParseFailure], jobs: int = 1,
                timeout: float = DEFAULT_TIMEOUT) -> MatchReport:
    """Match every rule against every reaction.

    Rows come sorted by (reaction id, rule id) regardless of ``jobs``.
    """
    items = sorted(rules.items() if isinstance(rules, Mapping) else rules, key=lambda kv: kv[0])
    reactions = list(reactions)
    rows: list[MatchRow] = []
    work = []
    for rx in reactions:
        if isinstance(rx, ParseFailure):
            rows.extend(MatchRow(rx.id, rid, 0, "parse_error") for rid, _ in (items or [(NO_RULE, None)]))
        elif not items:
            rows.append(MatchRow(rx.id, NO_RULE, 0, "no_match"))
        else:
            work.append((items, rx, timeout))
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for chunk in pool.map(_match_chunk, work):
                rows.extend(chunk)
    else:
        for w in work:
            rows.extend(_match_chunk(w))
    rows.sort(key=lambda r: (r.reaction_id, r.rule_id))
    return MatchReport(rows, _summarize(rows, reactions))


def _summarize(rows: Sequence[MatchRow], reactions: Sequence) -> dict:
    labels = {rx.id: rx.label for rx in reactions}
    per_reaction: dict[str, list[str]] = {rx.id: [] for rx in reactions}
    for r in rows:
        if r.status == "matched":
            per_reaction[r.reaction_id].append(r.rule_id)
    histogram: dict[str, int] = {}
    for rid, matched in per_reaction.items():
        if matched:
            histogram[labels[rid]] = histogram.get(labels[rid], 0) + 1
    return {
        "label_histogram": histogram,
        "matched_reactions": sum(1 for v in per_reaction.values() if v),
        "matched_pairs": sum(1 for r in rows if r.status == "matched"),
        "per_reaction": {k: sorted(v) for k, v in per_reaction.items()},
        "timeouts": [[r.reaction_id, r.rule_id] for r in rows if r.timed_out],
        "parse_errors": sorted(rx.id for rx in reactions if isinstance(rx, ParseFailure)),
    }


# -- corpus input ---------------------------------------------------------------------

def _structure(text: str, base: Path) -> Mixture:
    from .molparse import load_json, parse_smiles, read_mixture

    text = text.strip()
    if text.startswith("@"):
        return read_mixture(load_json(base / text[1:]))
    return parse_smiles(text)


def read_corpus(path) -> list[Reaction | ParseFailure]:
    """Reaction corpus TSV with header ``id, educts, products, label``."""
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh, delimiter="\t"))
    if not rows:
        raise ValueError(f"{path}: empty corpus")
    header = [h.strip() for h in rows[0]]
    if header[:4] != ["id", "educts", "products", "label"]:
        raise ValueError(f"{path}: header must start with id, educts, products, label")
    out: list[Reaction | ParseFailure] = []
    for line in rows[1:]:
        if not line or not "".join(line).strip():
            continue
        rid = line[0].strip()
        meta = {"label": line[3].strip() if len(line) > 3 else ""}
        if len(line) < 3:
            out.append(ParseFailure(rid, "missing columns", meta))
            continue
        try:
            educts = _structure(line[1], path.parent)
            products = _structure(line[2], path.parent)
        except (ValueError, OSError) as exc:
            out.append(ParseFailure(rid, str(exc), meta))
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", MassBalanceWarning)
            out.append(Reaction(rid, educts, products, meta))
    return out


def load_rules(directory) -> list[tuple[str, Rule]]:
    """``*.rule.json`` and ``*.srule.json`` files of a directory, keyed by file stem."""
    from .molparse import load_json, read_rule

    out = []
    for p in sorted(Path(directory).iterdir()):
        for suffix in (".srule.json", ".rule.json"):
            if p.name.endswith(suffix):
                out.append((p.name[:-len(suffix)], read_rule(load_json(p))))
                break
    return out


__all__ = [
    "Reaction", "ParseFailure", "MatchRow", "MatchReport", "RuleClasses", "MassBalanceWarning",
    "match_reaction", "is_refinement", "prune_refinements", "classify_rules", "batch_match",
    "read_corpus", "load_rules", "DEFAULT_TIMEOUT", "REPORT_COLUMNS",
]
