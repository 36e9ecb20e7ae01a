"""Catalogue of finitely presented algebras shipped as presentation files."""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from jinja2 import Environment, FileSystemLoader, StrictUndefined, TemplateNotFound

from .coeff import LaurentPoly, RingSpec, Specialization
from .freealg import AlgebraElement, OrderRule, WindowPolicy, Word

# Set up logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

PRESENTATION_DIR = Path(__file__).parent / "data" / "presentations"
FORMAT_HEADER = "# hecke-presentation v1"

_NAME = re.compile(r"^\s*([A-Za-z0-9_-]+?)\s*(?:\(\s*(-?\d+)\s*\))?\s*$")

# parametric entries: template file, parameter name, default, minimum
_TEMPLATES = {
    "Gd12": ("Gd12.pres.j2", "d", None, 2),
    "G4-nil": ("G4-nil.pres.j2", "m", 0, None),
    "Gd12-nil": ("Gd12-nil.pres.j2", "d", 3, 3),
}

_environment = Environment(loader=FileSystemLoader(str(PRESENTATION_DIR)), undefined=StrictUndefined)


class UnknownPresentationError(KeyError):
    """Requested catalogue entry does not exist."""


class PresentationFormatError(ValueError):
    """Malformed presentation file."""


@dataclass(frozen=True)
class Relation:
    """Signed combination of words that must act as zero."""

    name: str
    terms: Tuple[Tuple[object, Word], ...]

    def words(self) -> List[Word]:
        return [w for _, w in self.terms]


@dataclass(frozen=True)
class Presentation:
    """
    Generators, homogeneous braid relations and monic order relations.

    Args:
        name: Catalogue name
        ring: Coefficient ring of the order relations
        generators: Generator names, in canonical order
        braid_relations: Pairs (lhs, rhs) of positive words of equal length
        order_relations: One OrderRule per generator that has one
        expected_dimension: Known rank, when the algebra is a Hecke algebra
    """

    name: str
    ring: RingSpec
    generators: Tuple[str, ...]
    braid_relations: Tuple[Tuple[Word, Word], ...]
    order_relations: Tuple[OrderRule, ...]
    description: str = ""
    expected_dimension: Optional[int] = None

    @property
    def non_unital_constant(self) -> bool:
        """True when some order relation has a non-invertible constant term."""
        return any(not rule.coefficients[0].is_unit() for rule in self.order_relations)

    def order_rule(self, gen: str) -> Optional[OrderRule]:
        for rule in self.order_relations:
            if rule.generator == gen:
                return rule
        return None

    def orders(self) -> Tuple[int, ...]:
        return tuple(self.order_rule(g).order if self.order_rule(g) else 0 for g in self.generators)

    def window_policy(self) -> WindowPolicy:
        if self.non_unital_constant:
            raise ValueError(f"{self.name} has a non-invertible order constant; no window policy")
        return WindowPolicy(self.order_relations)

    def specialized_policy(self, spec: Specialization) -> WindowPolicy:
        return self.window_policy().specialize(lambda c: c.specialize(spec))

    def relations(self, coefficient: Optional[Callable] = None) -> List[Relation]:
        """
        Braid relations as lhs - rhs and order relations as g^n - sum c_i g^i.

        ``coefficient`` maps the LaurentPoly order coefficients into the
        target field (identity when omitted).
        """
        f = coefficient or (lambda c: c)
        out: List[Relation] = []
        for lhs, rhs in self.braid_relations:
            out.append(Relation(f"{lhs} = {rhs}", ((1, lhs), (-1, rhs))))
        for rule in self.order_relations:
            terms = [(1, Word.gen(rule.generator, rule.order))]
            for i, c in enumerate(rule.coefficients):
                value = f(c)
                if value:
                    terms.append((-value, Word.gen(rule.generator, i)))
            out.append(Relation(f"order({rule.generator})", tuple(terms)))
        return out

    def summary(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "ring": self.ring.describe(),
            "generators": list(self.generators),
            "braid_relations": [f"{l} = {r}" for l, r in self.braid_relations],
            "orders": list(self.orders()),
            "non_unital_constant": self.non_unital_constant,
            "expected_dimension": self.expected_dimension,
        }


def _parse_order(line_no: int, text: str, ring: RingSpec, generators: Tuple[str, ...]) -> OrderRule:
    if "=" not in text:
        raise PresentationFormatError(f"line {line_no}: order relation needs '='")
    lhs_text, rhs_text = text.split("=", 1)
    lhs = Word.parse(lhs_text)
    if len(lhs.letters) != 1 or lhs.letters[0][1] < 1:
        raise PresentationFormatError(f"line {line_no}: order lhs must be a positive generator power")
    gen, n = lhs.letters[0]
    if gen not in generators:
        raise PresentationFormatError(f"line {line_no}: unknown generator '{gen}'")
    rhs = AlgebraElement.parse(rhs_text, ring)
    coefficients = [ring.zero() for _ in range(n)]
    for word, coef in rhs.terms.items():
        if word.is_identity():
            k = 0
        elif len(word.letters) == 1 and word.letters[0][0] == gen and 0 < word.letters[0][1] < n:
            k = word.letters[0][1]
        else:
            raise PresentationFormatError(f"line {line_no}: '{word}' is not a lower power of {gen}")
        coefficients[k] = coef
    return OrderRule(gen, tuple(coefficients))


def parse_presentation(text: str) -> Presentation:
    """
    Parse a presentation file.

    Format (one ``key: value`` per line, ``#`` comments)::

        # hecke-presentation v1
        name: G4
        ring: a b c
        invertible: c
        generators: s1 s2
        braid: s1 s2 s1 = s2 s1 s2
        order: s1^3 = [a] s1^2 + [b] s1 + [c]
        expected-dimension: 24
    """
    lines = text.splitlines()
    meaningful = [l.strip() for l in lines if l.strip()]
    if not meaningful or meaningful[0] != FORMAT_HEADER:
        raise PresentationFormatError(f"Missing header '{FORMAT_HEADER}'")

    fields: Dict[str, str] = {}
    braids: List[Tuple[int, str]] = []
    orders: List[Tuple[int, str]] = []
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise PresentationFormatError(f"line {line_no}: expected 'key: value'")
        key, value = (part.strip() for part in line.split(":", 1))
        if key == "braid":
            braids.append((line_no, value))
        elif key == "order":
            orders.append((line_no, value))
        elif key in ("name", "description", "ring", "invertible", "generators", "expected-dimension"):
            fields[key] = value
        else:
            raise PresentationFormatError(f"line {line_no}: unknown key '{key}'")

    for key in ("name", "generators"):
        if key not in fields:
            raise PresentationFormatError(f"Missing '{key}'")

    ring = RingSpec(tuple(fields.get("ring", "").split()), frozenset(fields.get("invertible", "").split()))
    generators = tuple(fields["generators"].split())
    if len(set(generators)) != len(generators):
        raise PresentationFormatError(f"Duplicate generators in {generators}")

    braid_relations = []
    for line_no, value in braids:
        if "=" not in value:
            raise PresentationFormatError(f"line {line_no}: braid relation needs '='")
        lhs, rhs = (Word.parse(side) for side in value.split("=", 1))
        if lhs.degree != rhs.degree or any(e < 0 for _, e in lhs.letters + rhs.letters):
            raise PresentationFormatError(f"line {line_no}: braid relation must be positive and homogeneous")
        if not (lhs.generators() | rhs.generators()) <= set(generators):
            raise PresentationFormatError(f"line {line_no}: unknown generator in '{value}'")
        braid_relations.append((lhs, rhs))

    order_relations = tuple(_parse_order(n, v, ring, generators) for n, v in orders)
    if len({r.generator for r in order_relations}) != len(order_relations):
        raise PresentationFormatError("Two order relations for the same generator")

    expected = fields.get("expected-dimension")
    return Presentation(
        name=fields["name"],
        ring=ring,
        generators=generators,
        braid_relations=tuple(braid_relations),
        order_relations=order_relations,
        description=fields.get("description", ""),
        expected_dimension=int(expected) if expected else None,
    )


def parse_name(name: str) -> Tuple[str, Optional[int]]:
    """``Gd12(3)`` -> ("Gd12", 3); ``G26`` -> ("G26", None)."""
    match = _NAME.match(name)
    if not match:
        raise UnknownPresentationError(name)
    base, param = match.groups()
    return base, int(param) if param is not None else None


def render(name: str, param: Optional[int] = None) -> str:
    """Presentation file text for a catalogue entry."""
    if name in _TEMPLATES:
        template, key, default, minimum = _TEMPLATES[name]
        value = default if param is None else param
        if value is None:
            raise ValueError(f"{name} needs a parameter {key}, e.g. {name}(3)")
        if minimum is not None and value < minimum:
            raise ValueError(f"{name} needs {key} >= {minimum}, got {value}")
        return _environment.get_template(template).render(**{key: value})
    if param is not None:
        raise ValueError(f"{name} takes no parameter")
    path = PRESENTATION_DIR / f"{name}.pres"
    if not path.is_file():
        raise UnknownPresentationError(name)
    return path.read_text()


def catalogue(name: str, param: Optional[int] = None) -> Presentation:
    """
    Load a catalogue entry by name.

    Args:
        name: ``G4``, ``G12``, ``Gd12``, ``G26``, ``G26-parabolic-s2t``, ``G4-nil``,
            ``G12-nil``, ``G12-idem``, ``Gd12-nil`` or ``G422-AB-nil``; a parameter may
            be given inline as ``Gd12(3)``
        param: The d of G(d,1,2) or the m of s^3 = m

    Returns:
        Parsed Presentation
    """
    base, inline = parse_name(name)
    if inline is not None:
        if param is not None and param != inline:
            raise ValueError(f"Conflicting parameters for {name}: {param}")
        param = inline
    try:
        text = render(base, param)
    except TemplateNotFound as e:
        raise UnknownPresentationError(name) from e
    presentation = parse_presentation(text)
    logger.debug(f"Loaded presentation {presentation.name}")
    return presentation


def catalogue_names() -> List[str]:
    names = sorted(p.name[: -len(".pres")] for p in PRESENTATION_DIR.glob("*.pres"))
    return sorted(names + list(_TEMPLATES))


def group_specialization(p: Presentation) -> Specialization:
    """
    Point of the ring at which every order relation becomes g^n = 1.

    Each order coefficient must be a single ring variable (or zero); the
    constant ones go to 1 and the others to 0. Unconstrained variables are
    sent to 1 when invertible and to 0 otherwise.
    """
    values: Dict[str, Fraction] = {}
    for rule in p.order_relations:
        for i, coef in enumerate(rule.coefficients):
            if coef.is_zero():
                if i == 0:
                    raise ValueError(f"{p.name}: zero constant term, no group specialization")
                continue
            var = coef.single_variable()
            if var is None:
                raise ValueError(f"{p.name}: coefficient {coef} of {rule.generator} is not a ring variable")
            target = Fraction(1 if i == 0 else 0)
            if values.get(var, target) != target:
                raise ValueError(f"{p.name}: variable {var} is both a constant and a linear coefficient")
            values[var] = target
    for var in p.ring.variables:
        values.setdefault(var, Fraction(1 if var in p.ring.invertible else 0))
    return Specialization(p.ring, values)


def coefficient_map(spec: Specialization) -> Callable[[LaurentPoly], Fraction]:
    return lambda c: c.specialize(spec)
