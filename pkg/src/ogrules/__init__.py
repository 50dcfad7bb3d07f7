"""Double-pushout rules, overlay rules and overlay graphs for reaction mechanisms."""
from .chemgraph import (
    EMPTY_DIGEST, Atom, Bond, GraphError, Mixture, canonical_hash, components,
    find_monomorphisms, is_isomorphic, isomorphisms,
)
from .dpo import (
    Derivation, Mechanism, Rule, StepDelta, apply, combined_graph, execute, find_rule_matches,
    invert, rule_hash, rules_isomorphic,
)
from .enumeration import ReactionSequence, apply_partial_map, enumerate_overlays, link_steps
from .matcher import (
    Reaction, batch_match, classify_rules, is_refinement, match_reaction, prune_refinements,
)
from .overlay import (
    BondClass, OverlayGraph, bond_histories, build_og, classify_bond, compose,
    compose_rules_with_overlap, og_from_rule, overlay_rule, trajectory_rule,
)
from .substrate import CatalystAssignment, condense, detect_catalysts, substrate_rule

__version__ = "0.1.0"

__all__ = [
    "Atom", "Bond", "Mixture", "GraphError", "EMPTY_DIGEST", "canonical_hash", "components",
    "find_monomorphisms", "is_isomorphic", "isomorphisms", "Rule", "Derivation", "Mechanism",
    "StepDelta", "apply", "combined_graph", "execute", "find_rule_matches", "invert", "rule_hash",
    "rules_isomorphic", "ReactionSequence", "apply_partial_map", "enumerate_overlays",
    "link_steps", "Reaction", "batch_match", "classify_rules", "is_refinement", "match_reaction",
    "prune_refinements", "BondClass", "OverlayGraph", "bond_histories", "build_og",
    "classify_bond", "compose", "compose_rules_with_overlap", "og_from_rule", "overlay_rule",
    "trajectory_rule", "CatalystAssignment", "condense", "detect_catalysts", "substrate_rule",
]
