"""Input parsing (a SMILES subset) and the JSON document formats."""
from .documents import (
    DocumentError, dumps, load_json, mechanism_to_doc, mixture_to_doc, og_to_doc, read_delta,
    read_mechanism, read_mixture, read_og, read_reaction_sequence, read_rule, rule_to_doc,
    save_json, sequence_to_doc, write_mechanism, write_mixture, write_og,
    write_reaction_sequence, write_rule,
)
from .smiles import (
    SmilesError, SmilesSyntaxError, UnclosedRingError, UnsupportedFeatureError, ValenceError,
    allowed_valences, check_valence, parse_smiles,
)

__all__ = [
    "DocumentError", "dumps", "load_json", "save_json", "mixture_to_doc", "read_mixture",
    "write_mixture", "rule_to_doc", "read_rule", "write_rule", "read_delta", "mechanism_to_doc",
    "read_mechanism", "write_mechanism", "sequence_to_doc", "read_reaction_sequence",
    "write_reaction_sequence", "og_to_doc", "read_og", "write_og", "SmilesError",
    "SmilesSyntaxError", "UnclosedRingError", "UnsupportedFeatureError", "ValenceError",
    "allowed_valences", "check_valence", "parse_smiles",
]
