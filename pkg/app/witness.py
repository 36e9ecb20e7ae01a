"""Infinite-rank modules witnessing non-finite generation and torsion."""

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .freealg import Word
from .presentations import Presentation, catalogue
from .reports import Certificate
from .rewrite import check_trace, load_trace

# Set up logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

WITNESS_DIR = Path(__file__).parent / "data" / "witness"
FORMAT_HEADER = "# hecke-witness v1"

Symbol = Tuple[str, int]
Vector = Dict[Symbol, int]

_TERM = re.compile(r"\s*([+-])?\s*(?:\[\s*(-?\d+)\s*\])?\s*([A-Za-z][A-Za-z0-9_]*)\[([+-]?\d+)\]\s*")
_SYMBOL = re.compile(r"^\s*([A-Za-z][A-Za-z0-9_]*)\[(\d+)\]\s*$")


class WitnessError(ValueError):
    """Malformed module or an action leaving the index range r >= 1."""


@dataclass
class WitnessModule:
    """
    Free module with basis (family, r), r >= 1, and local action rules.

    ``rules[(g, f)]`` lists (coefficient, family, offset): g acts on f_r as
    the sum of coefficient * family_{r + offset}. Missing rules act by 0.
    """

    name: str
    presentation: str
    families: Tuple[str, ...]
    rules: Dict[Tuple[str, str], Tuple[Tuple[int, str, int], ...]]
    growth: List[Tuple[Word, Symbol]] = field(default_factory=list)

    @property
    def min_offset(self) -> int:
        offsets = [off for terms in self.rules.values() for _, _, off in terms]
        return min(offsets, default=0)

    def load_presentation(self) -> Presentation:
        return catalogue(self.presentation)


def format_vector(v: Vector) -> str:
    if not v:
        return "0"
    return " + ".join(f"{c}*{f}_{r}" if c != 1 else f"{f}_{r}" for (f, r), c in sorted(v.items()))


def parse_symbol(text: str) -> Symbol:
    match = _SYMBOL.match(text)
    if not match:
        raise WitnessError(f"Expected a symbol like w[1], got '{text}'")
    return match.group(1), int(match.group(2))


def _parse_action(line_no: int, text: str) -> Tuple[Tuple[int, str, int], ...]:
    text = text.strip()
    if text == "0":
        return ()
    terms = []
    pos = 0
    while pos < len(text):
        match = _TERM.match(text, pos)
        if not match or match.end() == pos:
            raise WitnessError(f"line {line_no}: cannot parse action '{text}'")
        sign, coef, family, offset = match.groups()
        value = int(coef) if coef else 1
        if sign == "-":
            value = -value
        terms.append((value, family, int(offset)))
        pos = match.end()
    return tuple(terms)


def parse_witness(text: str) -> WitnessModule:
    """
    Parse a witness module file.

    Format::

        # hecke-witness v1
        name: G4-nil
        presentation: G4-nil(0)
        families: w wp y yp
        act s2 w: y[+1]
        act s1 w: 0
        growth: s1^2 s2^2 from w[1]
    """
    lines = text.splitlines()
    meaningful = [l.strip() for l in lines if l.strip()]
    if not meaningful or meaningful[0] != FORMAT_HEADER:
        raise WitnessError(f"Missing header '{FORMAT_HEADER}'")
    fields: Dict[str, str] = {}
    rules: Dict[Tuple[str, str], Tuple[Tuple[int, str, int], ...]] = {}
    growth: List[Tuple[Word, Symbol]] = []
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition(":")
        key = key.strip()
        if key.startswith("act "):
            parts = key.split()
            if len(parts) != 3:
                raise WitnessError(f"line {line_no}: expected 'act <generator> <family>: ...'")
            rules[(parts[1], parts[2])] = _parse_action(line_no, value)
        elif key == "growth":
            word_text, sep, start = value.partition(" from ")
            if not sep:
                raise WitnessError(f"line {line_no}: expected 'growth: <word> from <symbol>'")
            growth.append((Word.parse(word_text), parse_symbol(start)))
        elif key in ("name", "presentation", "families"):
            fields[key] = value.strip()
        else:
            raise WitnessError(f"line {line_no}: unknown key '{key}'")
    for key in ("name", "presentation", "families"):
        if key not in fields:
            raise WitnessError(f"Missing '{key}'")
    families = tuple(fields["families"].split())
    for (gen, fam), terms in rules.items():
        if fam not in families or any(f not in families for _, f, _ in terms):
            raise WitnessError(f"Unknown family in the action of {gen} on {fam}")
    return WitnessModule(fields["name"], fields["presentation"], families, rules, growth)


def load_witness(name: str) -> WitnessModule:
    path = Path(name)
    if not path.is_file():
        path = WITNESS_DIR / f"{name}.wit"
    if not path.is_file():
        raise WitnessError(f"Unknown witness module '{name}'")
    return parse_witness(path.read_text())


def witness_names() -> List[str]:
    return sorted(p.stem for p in WITNESS_DIR.glob("*.wit"))


def act(m: WitnessModule, g: str, v: Vector, symbolic: bool = False, modulus: Optional[int] = None) -> Vector:
    """
    Action of generator ``g`` on a formal vector.

    With ``symbolic`` the indices are offsets from a generic r and are not
    bounded below.
    """
    out: Vector = {}
    for (family, r), c in v.items():
        for k, target, offset in m.rules.get((g, family), ()):
            index = r + offset
            if not symbolic and index < 1:
                raise WitnessError(f"{g} on {family}_{r} reaches index {index}")
            key = (target, index)
            out[key] = out.get(key, 0) + c * k
    if modulus:
        out = {key: c % modulus for key, c in out.items()}
    return {key: c for key, c in out.items() if c}


def act_word(m: WitnessModule, word: Word, v: Vector, symbolic: bool = False, modulus: Optional[int] = None) -> Vector:
    """Left action: the rightmost letter acts first."""
    for gen, exp in reversed(word.letters):
        if exp < 0:
            raise WitnessError(f"Generator {gen} is not invertible on a witness module")
        for _ in range(exp):
            v = act(m, gen, v, symbolic, modulus)
            if not v:
                return v
    return v


def _relation_residual(m: WitnessModule, relation, v: Vector, symbolic: bool, modulus: Optional[int]) -> Vector:
    total: Vector = {}
    for coef, word in relation.terms:
        scalar = coef.constant_value() if hasattr(coef, "constant_value") else int(coef)
        for key, c in act_word(m, word, v, symbolic, modulus).items():
            total[key] = total.get(key, 0) + scalar * c
    if modulus:
        total = {key: c % modulus for key, c in total.items()}
    return {key: c for key, c in total.items() if c}


def check_relations(m: WitnessModule, p: Optional[Presentation] = None, R: int = 100,
                    modulus: Optional[int] = None) -> Certificate:
    """
    Every defining relation of ``p`` acts by zero on every symbol of index <= R.

    Indices produced along the way are never truncated. When all offsets are
    non-negative the relations are also checked at a symbolic index, which
    covers every r >= 1.
    """
    if R < 4:
        raise ValueError(f"R must be at least 4, got {R}")
    p = p or m.load_presentation()
    if p.ring.variables:
        raise WitnessError(f"{p.name} has ring parameters; witness modules need integer relations")
    relations = p.relations()
    name = f"witness:{m.name}"
    checked = 0
    for relation in relations:
        for family in m.families:
            for r in range(1, R + 1):
                residual = _relation_residual(m, relation, {(family, r): 1}, False, modulus)
                checked += 1
                if residual:
                    logger.error(f"❌ {m.name}: {relation.name} fails on {family}_{r}")
                    return Certificate(
                        name=name, certified=False,
                        error=f"{relation.name} does not act by 0 on {family}_{r}",
                        counterexample={"relation": relation.name, "symbol": f"{family}_{r}",
                                        "residual": format_vector(residual)},
                    )
    symbolic = m.min_offset >= 0
    if symbolic:
        for relation in relations:
            for family in m.families:
                residual = _relation_residual(m, relation, {(family, 0): 1}, True, modulus)
                if residual:
                    return Certificate(
                        name=name, certified=False,
                        error=f"{relation.name} does not act by 0 on {family}_r for generic r",
                        counterexample={"relation": relation.name, "symbol": f"{family}_r",
                                        "residual": format_vector(residual)},
                    )
    logger.info(f"✅ {m.name}: {len(relations)} relations act by 0 up to R={R}")
    return Certificate(
        name=name, certified=True,
        details={"presentation": p.name, "R": R, "relations": [rel.name for rel in relations],
                 "symbols_checked": checked, "all_r": symbolic, "modulus": modulus},
    )


def growth_witness(m: WitnessModule, word: Word, start: Symbol, k: int = 50) -> Certificate:
    """word^i . start is a single basis symbol with strictly increasing index, i = 1..k."""
    orbit = [start]
    v: Vector = {start: 1}
    name = f"growth:{m.name}"
    for i in range(1, k + 1):
        v = act_word(m, word, v)
        if len(v) != 1 or next(iter(v.values())) != 1:
            return Certificate(
                name=name, certified=False,
                error=f"({word})^{i} does not send {start[0]}_{start[1]} to a basis symbol",
                counterexample={"power": i, "image": format_vector(v)},
            )
        symbol = next(iter(v))
        if symbol[1] <= orbit[-1][1]:
            return Certificate(
                name=name, certified=False,
                error=f"index does not increase at power {i}",
                counterexample={"power": i, "image": format_vector(v)},
            )
        orbit.append(symbol)
    steps = {b[1] - a[1] for a, b in zip(orbit, orbit[1:])}
    return Certificate(
        name=name, certified=True,
        details={"word": str(word), "start": f"{start[0]}_{start[1]}", "k": k,
                 "orbit": [f"{f}_{r}" for f, r in orbit],
                 "step": steps.pop() if len(steps) == 1 else None},
    )


def torsion_witness(include_enumeration: bool = True, seed: int = 7) -> Certificate:
    """
    Torsion in the G4 algebra at a = b = 0.

    Combines the rewriting trace c*(s1^2 s2^2)^6 = c^9, the G4-nil action
    (S1^2 S2^2)^6 . w_1 = w_13 showing (s1^2 s2^2)^6 != c^8 once c = 0, and,
    optionally, that the word is the identity in the group algebra.
    """
    trace = check_trace(load_trace("g4_torsion"))
    module = load_witness("G4-nil")
    power = Word.parse("(s1^2 s2^2)^6")
    image = act_word(module, power, {("w", 1): 1})
    action_ok = image == {("w", 13): 1}
    details = {
        "trace": trace.model_dump(),
        "action": {"word": str(power), "start": "w_1", "image": format_vector(image)},
    }
    certified = trace.certified and action_ok
    if include_enumeration and certified:
        from .enumeration import enumerate_algebra, eval_vector
        from .coeff import Specialization

        p = catalogue("G4")
        spec = Specialization(p.ring, {"a": 0, "b": 0, "c": 1})
        result = enumerate_algebra(p, spec, seed=seed)
        unit = result.unit_vector()
        identity_ok = eval_vector(result, power, unit) == unit
        details["group_algebra"] = {"dimension": result.dimension, "word_is_identity": identity_ok}
        certified = certified and identity_ok
    if not certified:
        return Certificate(name="torsion", certified=False, error="torsion witness incomplete", details=details,
                           counterexample=trace.counterexample)
    logger.info("✅ Torsion witness certified: (s1^2 s2^2)^6 . w_1 = w_13")
    return Certificate(name="torsion", certified=True, details=details)
