"""Single-step relation application and replay of rewriting traces."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from .coeff import DivisionError, LaurentPoly, RingSpec, Specialization, parse_rational
from .enumeration import EnumerationResult, enumerate_algebra, eval_vector
from .freealg import AlgebraElement, Word
from .linalg import SparseVector, axpy, vec_sub
from .presentations import catalogue
from .reports import Certificate

# Set up logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

TRACE_DIR = Path(__file__).parent / "data" / "traces"
FORMAT_HEADER = "# hecke-trace v1"


class PatternMismatchError(ValueError):
    """A step does not find its rule's pattern at the stated place."""

    def __init__(self, term: int, pos: int, rule: str, message: str):
        super().__init__(f"term {term}, position {pos}, rule {rule}: {message}")
        self.term = term
        self.pos = pos
        self.rule = rule


class TraceFormatError(ValueError):
    """Malformed trace file."""


@dataclass(frozen=True)
class RewriteRule:
    """
    A relation usable in both directions.

    Braid rules have a single-word right side; order rules rewrite a
    generator power into a combination.
    """

    id: str
    lhs: Word
    rhs: AlgebraElement
    kind: str = "braid"

    def oriented(self, direction: str) -> Tuple[Word, AlgebraElement, Optional[object]]:
        """(pattern, replacement, scalar the term coefficient is divided by)."""
        if direction == "fwd":
            return self.lhs, self.rhs, None
        if direction != "bwd":
            raise ValueError(f"Unknown direction '{direction}'")
        if len(self.rhs.terms) != 1:
            raise ValueError(f"Rule {self.id} has a multi-term right side; it cannot be applied backwards")
        (word, coef), = self.rhs.terms.items()
        divisor = None if coef == 1 else coef
        return word, AlgebraElement.of(self.lhs, 1), divisor


@dataclass(frozen=True)
class RewriteStep:
    term: int
    pos: int
    rule: str
    direction: str = "fwd"
    line: int = 0

    def __str__(self) -> str:
        return f"term={self.term} pos={self.pos} rule={self.rule} dir={self.direction}"


@dataclass
class RewriteTrace:
    name: str
    ring: RingSpec
    rules: Dict[str, RewriteRule]
    start: AlgebraElement
    end: AlgebraElement
    steps: List[RewriteStep] = field(default_factory=list)
    description: str = ""
    # catalogue entry the trace's elements live in, and variables pinned there
    presentation: Optional[str] = None
    fixed: Dict[str, Fraction] = field(default_factory=dict)


def _divide(coef, divisor):
    if isinstance(coef, LaurentPoly):
        return coef.divide_exact(divisor)
    return Fraction(coef) / Fraction(divisor)


def apply_rule(x: AlgebraElement, step: RewriteStep, rules: Dict[str, RewriteRule]) -> AlgebraElement:
    """
    Replace the occurrence of the rule's pattern named by ``step``.

    Positions count unit letters of the term's word, so ``s1^2 s2`` has
    positions 0, 1 (s1) and 2 (s2).
    """
    if step.rule not in rules:
        raise PatternMismatchError(step.term, step.pos, step.rule, "unknown rule")
    pattern, replacement, divisor = rules[step.rule].oriented(step.direction)
    terms = x.sorted_terms()
    if not 0 <= step.term < len(terms):
        raise PatternMismatchError(step.term, step.pos, step.rule, f"element has {len(terms)} terms")
    word, coef = terms[step.term]
    letters = word.expand()
    needle = pattern.expand()
    end = step.pos + len(needle)
    if step.pos < 0 or end > len(letters) or letters[step.pos:end] != needle:
        found = Word(letters[max(step.pos, 0):end])
        raise PatternMismatchError(step.term, step.pos, step.rule, f"expected '{pattern}', found '{found}'")
    if divisor is not None:
        try:
            coef = _divide(coef, divisor)
        except DivisionError as e:
            raise PatternMismatchError(step.term, step.pos, step.rule, str(e)) from e
    prefix, suffix = Word(letters[:step.pos]), Word(letters[end:])
    result = x - AlgebraElement.of(word, terms[step.term][1])
    for w, c in replacement.terms.items():
        result = result + AlgebraElement.of(prefix * w * suffix, coef * c)
    return result


def replay(tr: RewriteTrace) -> List[AlgebraElement]:
    """Start element followed by the element after each step."""
    elements = [tr.start]
    for step in tr.steps:
        elements.append(apply_rule(elements[-1], step, tr.rules))
    return elements


def check_trace(tr: RewriteTrace) -> Certificate:
    x = tr.start
    for index, step in enumerate(tr.steps):
        try:
            x = apply_rule(x, step, tr.rules)
        except (PatternMismatchError, ValueError) as e:
            logger.error(f"❌ Trace {tr.name} rejected at step {index}: {e}")
            return Certificate(
                name=f"trace:{tr.name}",
                certified=False,
                error=f"step {index} ({step}): {e}",
                counterexample={"step": index, "line": step.line, "element": str(x)},
            )
    difference = x - tr.end
    if difference:
        logger.error(f"❌ Trace {tr.name} ends at {x}, expected {tr.end}")
        return Certificate(
            name=f"trace:{tr.name}",
            certified=False,
            error="final element differs from the declared end",
            counterexample={"reached": str(x), "expected": str(tr.end), "difference": str(difference)},
        )
    return Certificate(
        name=f"trace:{tr.name}",
        certified=True,
        details={"steps": len(tr.steps), "start": str(tr.start), "end": str(tr.end), "ring": tr.ring.describe()},
    )


def _image(r: EnumerationResult, x: AlgebraElement, point: Specialization) -> SparseVector:
    out: SparseVector = {}
    for word, coef in x.terms.items():
        if isinstance(coef, LaurentPoly):
            coef = coef.specialize(point)
        axpy(out, eval_vector(r, word), Fraction(coef))
    return out


def representation_check(tr: RewriteTrace, points: int = 10, seed: int = 7,
                         cache_dir: Optional[Union[str, Path]] = None) -> Certificate:
    """
    Evaluate every intermediate element of a trace in enumerated regular modules.

    Each legal step preserves the element of the algebra, so all images
    must agree. This also catches rules that are not relations of the
    named presentation, which ``check_trace`` takes on trust.

    Args:
        tr: Trace naming a ``presentation``
        points: Number of seeded random points; variables in ``fixed`` keep their value
        seed: Point i is drawn with ``seed + i``
        cache_dir: Enumeration cache

    Returns:
        Certificate; the counterexample names the first step whose image
        differs and the point it differs at
    """
    name = f"representation:{tr.name}"
    if not tr.presentation:
        raise TraceFormatError(f"Trace {tr.name} names no presentation")
    p = catalogue(tr.presentation)
    foreign = (set(tr.ring.variables) | set(tr.fixed)) - set(p.ring.variables)
    if foreign:
        raise TraceFormatError(f"Trace {tr.name} uses {sorted(foreign)}, not variables of {p.name}")

    try:
        elements = replay(tr)
    except (PatternMismatchError, ValueError) as e:
        return Certificate(name=name, certified=False, error=f"trace does not replay: {e}")
    elements.append(tr.end)

    for i in range(points):
        values = dict(Specialization.random(p.ring, seed + i).values)
        values.update(tr.fixed)
        spec = Specialization(p.ring, values)
        point = Specialization(tr.ring, {v: values[v] for v in tr.ring.variables})
        r = enumerate_algebra(p, spec, seed=seed + i, cache_dir=cache_dir)
        reference = _image(r, elements[0], point)
        for index, x in enumerate(elements[1:]):
            image = _image(r, x, point)
            if image != reference:
                at_end = index == len(tr.steps)
                where = "declared end" if at_end else f"step {index} ({tr.steps[index]})"
                logger.error(f"❌ Trace {tr.name}: image changes at {where}, point {spec}")
                return Certificate(
                    name=name,
                    certified=False,
                    error=f"image in the regular module changes at {where}",
                    counterexample={
                        "step": None if at_end else index,
                        "line": None if at_end else tr.steps[index].line,
                        "seed": seed + i,
                        "specialization": spec.as_strings(),
                        "element": str(x),
                        "difference_support": len(vec_sub(image, reference)),
                    },
                )
        logger.info(f"✅ {tr.name}: {len(elements)} elements agree at point {i + 1}/{points} (dim {r.dimension})")
    return Certificate(
        name=name,
        certified=True,
        details={"presentation": p.name, "points": points, "seed": seed, "elements": len(elements),
                 "fixed": {k: str(v) for k, v in tr.fixed.items()}},
    )


def _parse_rule(line_no: int, rule_id: str, text: str, ring: RingSpec) -> RewriteRule:
    if "->" in text:
        lhs, rhs = text.split("->", 1)
        return RewriteRule(rule_id, Word.parse(lhs), AlgebraElement.parse(rhs, ring), kind="order")
    if "=" in text:
        lhs, rhs = text.split("=", 1)
        return RewriteRule(rule_id, Word.parse(lhs), AlgebraElement.of(Word.parse(rhs), ring.one()), kind="braid")
    raise TraceFormatError(f"line {line_no}: rule needs '=' (braid) or '->' (order)")


def parse_trace(text: str, name: str = "trace") -> RewriteTrace:
    """
    Parse a trace file.

    Format::

        # hecke-trace v1
        name: g4_torsion
        ring: c
        invertible:
        presentation: G4
        fixed: a=0, b=0
        rule b12: s1 s2 s1 = s2 s1 s2
        rule o1: s1^3 -> [c]
        start: [c] (s1^2 s2^2)^6
        end: [c^9]
        term=0 pos=1 rule=o2 dir=bwd

    Steps are applied in file order; ``dir`` defaults to ``fwd``.
    ``presentation`` and ``fixed`` are optional and only used by
    ``representation_check``.
    """
    lines = text.splitlines()
    meaningful = [l.strip() for l in lines if l.strip()]
    if not meaningful or meaningful[0] != FORMAT_HEADER:
        raise TraceFormatError(f"Missing header '{FORMAT_HEADER}'")

    fields: Dict[str, str] = {}
    rule_lines: List[Tuple[int, str, str]] = []
    steps: List[RewriteStep] = []
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("term="):
            parts = dict(item.split("=", 1) for item in line.split())
            try:
                steps.append(RewriteStep(int(parts["term"]), int(parts["pos"]), parts["rule"],
                                         parts.get("dir", "fwd"), line_no))
            except (KeyError, ValueError) as e:
                raise TraceFormatError(f"line {line_no}: bad step '{line}'") from e
            continue
        if ":" not in line:
            raise TraceFormatError(f"line {line_no}: expected 'key: value' or a step")
        key, value = (part.strip() for part in line.split(":", 1))
        if key.startswith("rule "):
            rule_lines.append((line_no, key[len("rule "):].strip(), value))
        elif key in ("name", "description", "ring", "invertible", "start", "end", "presentation", "fixed"):
            fields[key] = value
        else:
            raise TraceFormatError(f"line {line_no}: unknown key '{key}'")

    for key in ("start", "end"):
        if key not in fields:
            raise TraceFormatError(f"Missing '{key}'")
    ring = RingSpec(tuple(fields.get("ring", "").split()), frozenset(fields.get("invertible", "").split()))
    rules: Dict[str, RewriteRule] = {}
    for line_no, rule_id, value in rule_lines:
        if rule_id in rules:
            raise TraceFormatError(f"line {line_no}: duplicate rule '{rule_id}'")
        rules[rule_id] = _parse_rule(line_no, rule_id, value, ring)
    fixed: Dict[str, Fraction] = {}
    for item in fields.get("fixed", "").split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise TraceFormatError(f"fixed: expected name=value, got '{item.strip()}'")
        var, value = (part.strip() for part in item.split("=", 1))
        try:
            fixed[var] = parse_rational(value)
        except ValueError as e:
            raise TraceFormatError(f"fixed: {e}") from e
    return RewriteTrace(
        name=fields.get("name", name),
        ring=ring,
        rules=rules,
        start=AlgebraElement.parse(fields["start"], ring),
        end=AlgebraElement.parse(fields["end"], ring),
        steps=steps,
        description=fields.get("description", ""),
        presentation=fields.get("presentation") or None,
        fixed=fixed,
    )


def load_trace(path) -> RewriteTrace:
    path = Path(path)
    if not path.is_file() and (TRACE_DIR / f"{path.name}.trace").is_file():
        path = TRACE_DIR / f"{path.name}.trace"
    return parse_trace(path.read_text(), name=path.stem)


def shipped_traces() -> List[Path]:
    return sorted(TRACE_DIR.glob("*.trace"))
