import json
import re
import subprocess
import sys

import pytest

from golden_cases import CASES, GOLDEN, GOLDEN_ALIAS, INPUTS, data_dir, run_case, snapshot
from helpers import load_mechanism, load_sequence
from ogrules.cli import main
from ogrules.dpo import Mechanism, StepDelta
from ogrules.enumeration import apply_partial_map, enumerate_overlays
from ogrules.matcher import batch_match, load_rules, read_corpus
from ogrules.molparse import parse_smiles, write_mechanism, write_og, write_rule
from ogrules.overlay import build_og, og_from_rule, overlay_rule
from ogrules.substrate import substrate_rule_of

DATA = data_dir()


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden_outputs_are_reproducible(name, tmp_path):
    run_case(name, tmp_path / "a")
    run_case(name, tmp_path / "b")
    first, second = snapshot(tmp_path / "a"), snapshot(tmp_path / "b")
    assert first == second
    assert first == snapshot(GOLDEN / GOLDEN_ALIAS.get(name, name))


def edge_colors(dot: str) -> list[str]:
    return re.findall(r" -- a\d+ \[color=(\w+)", dot)


class TestDot:
    def test_substrate_og(self):
        dot = (GOLDEN / "substrate_lipase" / "lipase_substrate.dot").read_text()
        colors = edge_colors(dot)
        assert colors.count("green") == 2 and colors.count("red") == 2
        assert colors.count("black") == 1
        assert re.search(r'a30 \[label="-/H", color=green', dot)
        assert re.search(r'a37 \[label="H/-", color=red', dot)

    def test_full_og(self):
        colors = edge_colors((GOLDEN / "overlay_lipase" / "lipase.dot").read_text())
        assert colors.count("green") == 3 and colors.count("red") == 3
        assert colors.count("blue") == 3

    def test_collapse_hides_only_idle_hydrogens(self):
        full = (GOLDEN / "substrate_lipase" / "lipase_substrate.dot").read_text()
        collapsed = (GOLDEN / "substrate_lipase" / "collapsed.dot").read_text()
        assert edge_colors(full) == edge_colors(collapsed)

    def test_transient_constraints_are_dashed(self):
        dot = (GOLDEN / "overlay_lipase" / "lipase.dot").read_text()
        assert all("style=dashed" in line for line in dot.splitlines() if "color=blue" in line)


class TestThinAdapter:
    """CLI outputs are exactly the library's serializations."""

    def test_overlay(self):
        m = load_mechanism("lipase")
        assert (GOLDEN / "overlay_lipase" / "lipase.rule.json").read_text() == write_rule(overlay_rule(m)[0])
        assert (GOLDEN / "overlay_lipase" / "lipase.og.json").read_text() == write_og(build_og(m))

    def test_substrate(self):
        rule, _ = substrate_rule_of(load_mechanism("lipase"))
        assert (GOLDEN / "substrate_lipase" / "lipase.srule.json").read_text() == write_rule(rule, substrate=True)
        assert (GOLDEN / "substrate_lipase" / "lipase_substrate.og.json").read_text() == \
            write_og(og_from_rule(rule, substrate=True))

    def test_enumerate(self):
        pins = [(p["step_index"], p["product_atom"], p["next_educt_atom"])
                for p in json.loads((INPUTS / "symmetry_pins.json").read_text())]
        seq = apply_partial_map(load_sequence("symmetry"), pins)
        res = enumerate_overlays(seq)
        assert (GOLDEN / "enumerate_symmetry" / "pinned" / "overlay_000.rule.json").read_text() == \
            write_rule(res.overlay_rules[0])

    def test_match(self):
        report = batch_match(load_rules(DATA / "rules" / "hydrolase"), read_corpus(DATA / "corpus" / "mini.tsv"))
        assert (GOLDEN / "match_serial" / "report.tsv").read_text() == report.to_tsv()
        assert (GOLDEN / "match_serial" / "report.summary.json").read_text() == report.summary_json()

    def test_bundled_keto_rule(self):
        assert (GOLDEN / "compose_keto" / "keto.srule.json").read_text() == \
            (DATA / "rules" / "extra" / "hydrolase_2h_keto.srule.json").read_text()


class TestErrors:
    def run(self, capsys, argv):
        code = main(argv)
        return code, capsys.readouterr().err

    def test_bad_smiles(self, capsys):
        code, err = self.run(capsys, ["parse", "--smiles", "C1CC"])
        assert code == 1 and err.startswith("ERROR:smiles_error:")

    def test_missing_file(self, capsys, tmp_path):
        code, err = self.run(capsys, ["overlay", "--mech", str(tmp_path / "nope.json"),
                                      "--rule", str(tmp_path / "r.json")])
        assert code == 1 and err.startswith("ERROR:")

    def test_malformed_json(self, capsys, tmp_path):
        p = tmp_path / "m.json"
        p.write_text("{not json")
        code, err = self.run(capsys, ["overlay", "--mech", str(p), "--rule", str(tmp_path / "r.json")])
        assert code == 1 and err.startswith("ERROR:json_error:")

    def test_inconsistent_mechanism(self, capsys, tmp_path):
        doc = json.loads((DATA / "mechanisms" / "lipase.mech.json").read_text())
        doc["steps"][1]["bond_changes"][0]["from"] = 3
        p = tmp_path / "m.json"
        p.write_text(json.dumps(doc))
        code, err = self.run(capsys, ["overlay", "--mech", str(p), "--rule", str(tmp_path / "r.json")])
        assert code == 1 and err.startswith("ERROR:inconsistent_delta:") and "step 1" in err

    def test_contradictory_pins(self, capsys, tmp_path):
        p = tmp_path / "pins.json"
        p.write_text("[[0, 0, 1]]")
        code, err = self.run(capsys, ["enumerate", "--seq", str(DATA / "sequences" / "symmetry.seq.json"),
                                      "--outdir", str(tmp_path / "o"), "--pins", str(p)])
        assert code == 1 and err.startswith("ERROR:contradictory_pin:")

    def test_catalyst_index(self, capsys, tmp_path):
        code, err = self.run(capsys, ["substrate", "--mech", str(DATA / "mechanisms" / "lipase.mech.json"),
                                      "--catalysts", "9", "--out", str(tmp_path / "s.json")])
        assert code == 1 and err.startswith("ERROR:catalyst_error:")

    def test_compose_needs_two_rules(self, capsys, tmp_path):
        code, err = self.run(capsys, ["compose", "--rule", str(DATA / "rules" / "extra" / "keto_enol.rule.json"),
                                      "--out", str(tmp_path / "c.json")])
        assert code == 2 and "ERROR:usage:" in err

    def test_bad_catalyst_list(self, capsys, tmp_path):
        code, _ = self.run(capsys, ["substrate", "--mech", str(DATA / "mechanisms" / "lipase.mech.json"),
                                    "--catalysts", "x,y", "--out", str(tmp_path / "s.json")])
        assert code == 2

    @pytest.mark.parametrize("argv", [[], ["frobnicate"], ["parse"], ["match", "--rules", "x"]])
    def test_usage(self, argv):
        with pytest.raises(SystemExit) as info:
            main(argv)
        assert info.value.code == 2

    def test_no_output_file_on_error(self, tmp_path):
        out = tmp_path / "m.json"
        assert main(["parse", "--smiles", "C(", "--out", str(out)]) == 1
        assert not out.exists()


def test_parse_writes_stdout(capsys):
    assert main(["parse", "--smiles", "O"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert [v["element"] for v in doc["vertices"]] == ["O", "H", "H"]


def test_substrate_without_catalyst_warns(capsys, tmp_path):
    m = Mechanism.from_deltas(parse_smiles("C.O"), [StepDelta(((0, 2, 1, 0), (1, 2, 0, 1)))])
    p = tmp_path / "m.json"
    p.write_text(write_mechanism(m))
    out = tmp_path / "s.json"
    assert main(["substrate", "--mech", str(p), "--out", str(out)]) == 0
    assert "no catalytic component" in capsys.readouterr().err
    assert out.read_text() == write_rule(overlay_rule(m)[0], substrate=True)


def test_console_entry_point(tmp_path):
    out = tmp_path / "w.json"
    proc = subprocess.run([sys.executable, "-m", "ogrules.cli", "parse", "--smiles", "O", "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert main(["parse", "--smiles", "O", "--out", str(tmp_path / "x.json")]) == 0
    assert out.read_text() == (tmp_path / "x.json").read_text()
