"""A SMILES subset with explicit hydrogen expansion.

Supported: organic-subset atoms, bracket atoms with H-count and charge, the
bond symbols ``-``, ``=``, ``#``, branches, ring closures (digits and ``%nn``)
and ``.`` separators. Aromatic lowercase atoms, stereo markers, isotopes and
atom classes are rejected with :class:`UnsupportedFeatureError`.
"""
from __future__ import annotations

from ..chemgraph import Atom, Bond, Mixture, pair

ORGANIC = ("Cl", "Br", "B", "C", "N", "O", "P", "S", "F", "I")
BRACKET_ELEMENTS = ("Cl", "Br", "Si", "H", "B", "C", "N", "O", "P", "S", "F", "I")
VALENCES = {
    "H": (1,), "B": (3,), "C": (4,), "N": (3,), "O": (2,), "F": (1,), "Si": (4,),
    "P": (3, 5), "S": (2, 4, 6), "Cl": (1,), "Br": (1,), "I": (1,),
}
_ELECTRON_RICH = {"N", "O", "P", "S", "F", "Cl", "Br", "I"}
BOND_SYMBOLS = {"-": 1, "=": 2, "#": 3}


class SmilesError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


class SmilesSyntaxError(SmilesError):
    pass


class UnclosedRingError(SmilesError):
    pass


class ValenceError(SmilesError):
    pass


class UnsupportedFeatureError(SmilesError):
    pass


def allowed_valences(element: str, charge: int) -> list[int]:
    """Bond-order sums (hydrogens included) an atom may carry at a given charge."""
    base = VALENCES[element]
    if element in _ELECTRON_RICH:
        vals = [v + charge for v in base]
    elif element == "B":
        vals = [v - charge for v in base]
    else:
        vals = [v - abs(charge) for v in base]
    return [v for v in vals if v >= 0]


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        # heavy (explicitly written) atoms: [element, charge, hcount or None, position]
        self.atoms: list[list] = []
        self.bonds: dict[tuple[int, int], int] = {}
        self.rings: dict[int, tuple[int, int | None, int]] = {}

    def error(self, cls, message, pos=None):
        raise cls(message, self.pos if pos is None else pos)

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self):
        text = self.text
        if not text:
            return
        prev: int | None = None
        stack: list[int | None] = []
        bond: int | None = None
        just_opened = False
        while self.pos < len(text):
            c = text[self.pos]
            if c in BOND_SYMBOLS:
                if bond is not None or prev is None:
                    self.error(SmilesSyntaxError, f"unexpected bond symbol {c!r}")
                bond = BOND_SYMBOLS[c]
                self.pos += 1
            elif c in "/\\":
                self.error(UnsupportedFeatureError, "stereo bond markers are not supported")
            elif c == ":":
                self.error(UnsupportedFeatureError, "aromatic bonds are not supported")
            elif c == "(":
                if prev is None or bond is not None:
                    self.error(SmilesSyntaxError, "branch must follow an atom")
                stack.append(prev)
                self.pos += 1
                just_opened = True
                continue
            elif c == ")":
                if not stack or bond is not None or just_opened:
                    self.error(SmilesSyntaxError, "unbalanced or empty branch")
                prev = stack.pop()
                self.pos += 1
            elif c == ".":
                if stack or bond is not None or prev is None:
                    self.error(SmilesSyntaxError, "misplaced '.'")
                prev = None
                self.pos += 1
            elif c.isdigit() or c == "%":
                if prev is None:
                    self.error(SmilesSyntaxError, "ring closure must follow an atom")
                start = self.pos
                if c == "%":
                    digits = text[self.pos + 1:self.pos + 3]
                    if len(digits) != 2 or not digits.isdigit():
                        self.error(SmilesSyntaxError, "'%' must be followed by two digits")
                    num = int(digits)
                    self.pos += 3
                else:
                    num = int(c)
                    self.pos += 1
                self.ring(num, prev, bond, start)
                bond = None
            elif c == "[" or c.isalpha() or c == "*":
                atom = self.atom()
                if prev is not None:
                    self.add_bond(prev, atom, bond or 1)
                elif bond is not None:
                    self.error(SmilesSyntaxError, "bond without a preceding atom")
                bond = None
                prev = atom
                just_opened = False
                continue
            else:
                self.error(SmilesSyntaxError, f"unexpected character {c!r}")
        if bond is not None:
            self.error(SmilesSyntaxError, "dangling bond symbol at end of input")
        if stack:
            self.error(SmilesSyntaxError, "unclosed branch")
        if self.rings:
            num, (_, _, where) = next(iter(self.rings.items()))
            self.error(UnclosedRingError, f"ring bond {num} is never closed", where)

    def add_bond(self, a: int, b: int, order: int, where: int | None = None):
        p = pair(a, b)
        if a == b or p in self.bonds:
            self.error(SmilesSyntaxError, "duplicate or self bond", where)
        self.bonds[p] = order

    def ring(self, num, atom, bond, where):
        if num in self.rings:
            other, other_bond, _ = self.rings.pop(num)
            if bond is not None and other_bond is not None and bond != other_bond:
                self.error(SmilesSyntaxError, f"conflicting bond orders on ring bond {num}", where)
            self.add_bond(other, atom, bond or other_bond or 1, where)
        else:
            self.rings[num] = (atom, bond, where)

    def atom(self) -> int:
        text = self.text
        start = self.pos
        c = text[self.pos]
        if c == "[":
            return self.bracket_atom()
        if c == "*":
            self.error(UnsupportedFeatureError, "wildcard atoms are not supported")
        if c.islower():
            self.error(UnsupportedFeatureError, f"aromatic atom {c!r} is not supported")
        for sym in ORGANIC:
            if text.startswith(sym, self.pos):
                self.pos += len(sym)
                self.atoms.append([sym, 0, None, start])
                return len(self.atoms) - 1
        self.error(SmilesSyntaxError, f"unknown atom symbol starting with {c!r}")

    def bracket_atom(self) -> int:
        text = self.text
        start = self.pos
        end = text.find("]", start)
        if end < 0:
            self.error(SmilesSyntaxError, "unterminated bracket atom")
        body = text[start + 1:end]
        i = 0
        if body[:1].isdigit():
            self.error(UnsupportedFeatureError, "isotopes are not supported", start + 1)
        for sym in BRACKET_ELEMENTS:
            if body.startswith(sym, i):
                element = sym
                i += len(sym)
                break
        else:
            if body[:1].islower():
                self.error(UnsupportedFeatureError, "aromatic atoms are not supported", start + 1)
            self.error(SmilesSyntaxError, f"unknown element in [{body}]", start + 1)
        if "@" in body:
            self.error(UnsupportedFeatureError, "chirality markers are not supported", start)
        if ":" in body:
            self.error(UnsupportedFeatureError, "atom classes are not supported", start)
        hcount = 0
        if i < len(body) and body[i] == "H":
            i += 1
            j = i
            while j < len(body) and body[j].isdigit():
                j += 1
            hcount = int(body[i:j]) if j > i else 1
            i = j
        charge = 0
        if i < len(body) and body[i] in "+-":
            sign = 1 if body[i] == "+" else -1
            j = i + 1
            while j < len(body) and body[j] == body[i]:
                j += 1
            if j > i + 1:
                charge = sign * (j - i)
            else:
                k = j
                while k < len(body) and body[k].isdigit():
                    k += 1
                charge = sign * (int(body[j:k]) if k > j else 1)
                j = k
            i = j
        if i != len(body):
            self.error(SmilesSyntaxError, f"cannot parse bracket atom [{body}]", start)
        if not -4 <= charge <= 4:
            self.error(SmilesSyntaxError, f"charge {charge} outside [-4, 4]", start)
        self.pos = end + 1
        self.atoms.append([element, charge, hcount, start])
        return len(self.atoms) - 1


def parse_smiles(text: str) -> Mixture:
    """Parse ``text`` into a :class:`Mixture` with explicit hydrogens.

    Written atoms get ids 0..n-1 in token order; implicit and bracket
    hydrogens follow, grouped by the atom they are attached to.
    """
    p = _Parser(text.strip())
    p.parse()
    bond_sum = [0] * len(p.atoms)
    for (a, b), o in p.bonds.items():
        bond_sum[a] += o
        bond_sum[b] += o
    hydrogens = []
    for idx, (element, charge, hcount, where) in enumerate(p.atoms):
        allowed = allowed_valences(element, charge)
        if hcount is None:
            fitting = [v for v in allowed if v >= bond_sum[idx]]
            if not fitting:
                raise ValenceError(f"{element} carries bond order {bond_sum[idx]}, "
                                   f"more than its valence allows", where)
            hcount = fitting[0] - bond_sum[idx]
        elif bond_sum[idx] + hcount not in allowed:
            raise ValenceError(f"[{element}] with charge {charge} cannot carry "
                               f"{bond_sum[idx] + hcount} bonds", where)
        hydrogens.append(hcount)
    atoms = [Atom(i, el, ch) for i, (el, ch, _, _) in enumerate(p.atoms)]
    bonds = [Bond(a, b, o) for (a, b), o in p.bonds.items()]
    nxt = len(atoms)
    for idx, n in enumerate(hydrogens):
        for _ in range(n):
            atoms.append(Atom(nxt, "H", 0))
            bonds.append(Bond(idx, nxt, 1))
            nxt += 1
    return Mixture(atoms, bonds)


def check_valence(g: Mixture) -> list[int]:
    """Atoms whose bond-order sum is not an allowed valence for their charge."""
    bad = []
    for v in g.atom_ids():
        el, ch = g.label(v)
        if sum(g.neighbors(v).values()) not in allowed_valences(el, ch):
            bad.append(v)
    return bad
