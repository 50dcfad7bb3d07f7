"""Regenerate the bundled fixtures under src/ogrules/data.

Mechanisms are transcribed by hand as step deltas on SMILES-built educts;
every rule file is derived from them with the library itself. Run from the
repository root:

    python3 tools/make_data.py
"""
from __future__ import annotations

import sys
from pathlib import Path

from ogrules.chemgraph import Mixture
from ogrules.dpo import Mechanism, Rule, StepDelta
from ogrules.enumeration import ReactionSequence
from ogrules.molparse import (
    dumps, mechanism_to_doc, parse_smiles, rule_to_doc, sequence_to_doc,
)
from ogrules.overlay import compose_rules_with_overlap
from ogrules.substrate import substrate_rule_of

DATA = Path(__file__).resolve().parents[1] / "src" / "ogrules" / "data"


def hydrogens(g: Mixture, v: int) -> list[int]:
    return sorted(w for w in g.neighbors(v) if g.element(w) == "H")


def two_h_mechanism(smiles: str, ser_o: int, his_n: int, water_o: int, carbonyl_c: int,
                    carbonyl_o: int, ester_o: int) -> Mechanism:
    """Serine/histidine hydrolysis in four steps: attack, release, water attack, regeneration."""
    E = parse_smiles(smiles)
    h_ser = hydrogens(E, ser_o)[0]
    h_w = hydrogens(E, water_o)[0]
    c, o, n = carbonyl_c, carbonyl_o, his_n
    steps = [
        StepDelta(((c, o, 2, 1), (n, h_ser, 0, 1), (ser_o, h_ser, 1, 0), (ser_o, c, 0, 1)),
                  ((o, 0, -1), (n, 0, 1))),
        StepDelta(((c, o, 1, 2), (n, h_ser, 1, 0), (c, ester_o, 1, 0), (h_ser, ester_o, 0, 1)),
                  ((o, -1, 0), (n, 1, 0))),
        StepDelta(((c, o, 2, 1), (n, h_w, 0, 1), (water_o, h_w, 1, 0), (water_o, c, 0, 1)),
                  ((o, 0, -1), (n, 0, 1))),
        StepDelta(((c, o, 1, 2), (n, h_w, 1, 0), (ser_o, c, 1, 0), (ser_o, h_w, 0, 1)),
                  ((o, -1, 0), (n, 1, 0))),
    ]
    return Mechanism.from_deltas(E, steps)


def one_h_mechanism(smiles: str, his_n: int, water_o: int, carbonyl_c: int, carbonyl_o: int,
                    ester_o: int) -> Mechanism:
    """Histidine-only hydrolysis: general-base water attack, then collapse with proton return."""
    E = parse_smiles(smiles)
    h_w = hydrogens(E, water_o)[0]
    c, o, n = carbonyl_c, carbonyl_o, his_n
    steps = [
        StepDelta(((c, o, 2, 1), (n, h_w, 0, 1), (water_o, h_w, 1, 0), (water_o, c, 0, 1)),
                  ((o, 0, -1), (n, 0, 1))),
        StepDelta(((c, o, 1, 2), (c, ester_o, 1, 0), (n, h_w, 1, 0), (ester_o, h_w, 0, 1)),
                  ((o, -1, 0), (n, 1, 0))),
    ]
    return Mechanism.from_deltas(E, steps)


def lipase() -> Mechanism:
    # Ser 0-2, His 3-8 (N1 = 8), water 9, triacylglycerol 10-24 (C1 = 11, =O 12, ester O 13)
    return two_h_mechanism("CCO.CC1=CNC=N1.O.CC(=O)OCC(OC(C)=O)COC(C)=O",
                           ser_o=2, his_n=8, water_o=9, carbonyl_c=11, carbonyl_o=12, ester_o=13)


def esterase_2h() -> Mechanism:
    # Ser 0-2, His 3-8, water 9, ethyl acetate: 10 CH3, 11 CH2, 12 O, 13 C, 14 CH3, 15 =O
    return two_h_mechanism("CCO.CC1=CNC=N1.O.CCOC(C)=O",
                           ser_o=2, his_n=8, water_o=9, carbonyl_c=13, carbonyl_o=15, ester_o=12)


def esterase_1h() -> Mechanism:
    # His 0-5 (N1 = 5), water 6, ethyl acetate: 7 CH3, 8 CH2, 9 O, 10 C, 11 CH3, 12 =O
    return one_h_mechanism("CC1=CNC=N1.O.CCOC(C)=O",
                           his_n=5, water_o=6, carbonyl_c=10, carbonyl_o=12, ester_o=9)


def deprotonation_rule() -> Rule:
    left = Mixture.from_maps({0: ("O", 0), 1: ("H", 0)}, {(0, 1): 1})
    right = Mixture.from_maps({0: ("O", -1), 1: ("H", 1)}, {})
    return Rule(left, right, {0, 1}, set())


def keto_enol_rule() -> Rule:
    # 0 O, 1 H, 2 C (enol carbon), 3 C
    left = Mixture.from_maps({0: ("O", 0), 1: ("H", 0), 2: ("C", 0), 3: ("C", 0)},
                             {(0, 1): 1, (0, 2): 1, (2, 3): 2})
    right = Mixture.from_maps({0: ("O", 0), 1: ("H", 0), 2: ("C", 0), 3: ("C", 0)},
                              {(0, 2): 2, (2, 3): 1, (1, 3): 1})
    return Rule(left, right, {0, 1, 2, 3}, {(0, 2), (2, 3)})


def with_context(rule: Rule, anchor: int, element: str = "C") -> Rule:
    """``rule`` plus one extra preserved atom single-bonded to ``anchor`` on both sides."""
    new = max(rule.atom_ids()) + 1
    left = Mixture.from_maps({**rule.left.labels, new: (element, 0)},
                             {**rule.left.orders, (anchor, new): 1})
    right = Mixture.from_maps({**rule.right.labels, new: (element, 0)},
                              {**rule.right.orders, (anchor, new): 1})
    return Rule(left, right, rule.context_atoms | {new}, rule.context_bonds | {(anchor, new)},
                rule.nonbond_left, rule.nonbond_right)


def symmetry_sequence() -> ReactionSequence:
    # F-NH2 takes the proton of HCl, then F-NH3+ gives one back
    a = parse_smiles("NF.Cl")
    b = parse_smiles("[NH3+]F.[Cl-]")
    ident = {v: v for v in a.labels}
    return ReactionSequence(((a, b, ident), (b, a, ident)))


def two_site_sequence() -> ReactionSequence:
    a = parse_smiles("OF.Cl.SBr.I")
    b = parse_smiles("[OH2+]F.[Cl-].[SH2+]Br.[I-]")
    ident = {v: v for v in a.labels}
    return ReactionSequence(((a, b, ident), (b, a, ident)))


CORPUS = [
    ("h1", "COC(C)=O.O", "CC(=O)O.CO", "3.1.1"),
    ("h2", "CCC(=O)OCC.O", "CCC(=O)O.CCO", "3.1.1"),
    ("h3", "CC(=O)OCC(OC(C)=O)COC(C)=O.O", "CC(=O)O.OCC(OC(C)=O)COC(C)=O", "3.1.1"),
    ("h4", "CCCC(=O)OC.O", "CCCC(=O)[O-].CO.[H+]", "3.1.1"),
    ("h5", "CC(=O)OC(C)C.O", "CC(=O)[O-].CC(C)O.[H+]", "3.1.1"),
    ("h6", "O=COC.O", "O=C[O-].CO.[H+]", "3.1.1"),
    ("t1", "COC(C)=O.CCO", "CCOC(C)=O.CO", "2.3.1"),
    ("t2", "CCOC(C)=O.CCCO", "CCCOC(C)=O.CCO", "2.3.1"),
    ("d1", "CNC(C)=O.O", "CC(=O)O.CN", "3.5.1"),
    ("d2", "COC.O", "CO.CO", "3.3.2"),
]

KETONE_CORPUS = [
    ("k1", "CC(=O)OC(C)=C.O", "CC(=O)O.CC(C)=O", "3.1.1"),
]


def write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(text.encode("utf-8"))
    print(f"wrote {path.relative_to(DATA.parents[2])}")


def tsv(rows) -> str:
    lines = ["id\teducts\tproducts\tlabel"] + ["\t".join(r) for r in rows]
    return "\n".join(lines) + "\n"


def main() -> int:
    mechs = {"lipase": lipase(), "esterase_2h": esterase_2h(), "esterase_1h": esterase_1h()}
    for name, m in mechs.items():
        write(DATA / "mechanisms" / f"{name}.mech.json", dumps(mechanism_to_doc(m)))
    write(DATA / "sequences" / "symmetry.seq.json", dumps(sequence_to_doc(symmetry_sequence())))
    write(DATA / "sequences" / "two_sites.seq.json", dumps(sequence_to_doc(two_site_sequence())))

    two_h, _ = substrate_rule_of(mechs["lipase"])
    two_h_alt, _ = substrate_rule_of(mechs["esterase_2h"])
    one_h, _ = substrate_rule_of(mechs["esterase_1h"])
    deprot = deprotonation_rule()
    keto = keto_enol_rule()
    # lipase ids: the water oxygen 9 ends up as the OH of the released acid
    two_h_coo = compose_rules_with_overlap(two_h, deprot, {9: 0})
    one_h_coo = compose_rules_with_overlap(one_h, deprot, {6: 0})
    created = sorted(two_h.created_atoms)[0]
    two_h_keto = compose_rules_with_overlap(two_h, keto, {13: 0, created: 1})

    def srule(rule):
        return dumps(rule_to_doc(rule, substrate=True))

    core = DATA / "rules" / "core"
    write(core / "hydrolase_2h.srule.json", srule(two_h))
    write(core / "hydrolase_2h_alt.srule.json", srule(two_h_alt))
    write(core / "hydrolase_1h.srule.json", srule(one_h))
    hyd = DATA / "rules" / "hydrolase"
    write(hyd / "hydrolase_2h.srule.json", srule(two_h))
    write(hyd / "hydrolase_2h_coo.srule.json", srule(two_h_coo))
    write(hyd / "hydrolase_2h_ctx.srule.json", srule(with_context(two_h, 11)))
    write(hyd / "hydrolase_2h_coo_ctx.srule.json", srule(with_context(two_h_coo, 11)))
    extra = DATA / "rules" / "extra"
    write(extra / "hydrolase_1h_coo.srule.json", srule(one_h_coo))
    write(extra / "hydrolase_2h_keto.srule.json", srule(two_h_keto))
    write(extra / "deprotonation.rule.json", dumps(rule_to_doc(deprot)))
    write(extra / "keto_enol.rule.json", dumps(rule_to_doc(keto)))
    write(DATA / "overlaps" / "ester_oxygen_keto.json", dumps([[13, 0], [created, 1]]))
    write(DATA / "corpus" / "mini.tsv", tsv(CORPUS))
    write(DATA / "corpus" / "ketone.tsv", tsv(KETONE_CORPUS))
    return 0


if __name__ == "__main__":
    sys.exit(main())
