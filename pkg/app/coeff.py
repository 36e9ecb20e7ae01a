"""Exact coefficient arithmetic: integer Laurent polynomials, rational specializations and Q(j)."""

import hashlib
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

# Set up logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

_TRANSFORMATIONS = standard_transformations + (convert_xor,)

Rational = Union[int, Fraction]


class RingMismatchError(ValueError):
    """Operands live in different coefficient rings."""


class DivisionError(ArithmeticError):
    """Exact division is impossible in the ring."""


@dataclass(frozen=True)
class RingSpec:
    """
    Integer Laurent polynomial ring Z[v1, ..., vn] with some variables inverted.

    Args:
        variables: Variable names in exponent-vector order
        invertible: Names whose negative powers are allowed
    """

    variables: Tuple[str, ...]
    invertible: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "invertible", frozenset(self.invertible))
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"Duplicate ring variables: {self.variables}")
        unknown = self.invertible - set(self.variables)
        if unknown:
            raise ValueError(f"Invertible variables not in ring: {sorted(unknown)}")

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise ValueError(f"Unknown variable '{name}' for ring {self.describe()}") from None

    def describe(self) -> str:
        names = [f"{v}^±" if v in self.invertible else v for v in self.variables]
        return "Z[" + ",".join(names) + "]"

    def zero(self) -> "LaurentPoly":
        return LaurentPoly(self, {})

    def one(self) -> "LaurentPoly":
        return LaurentPoly.constant(self, 1)

    def var(self, name: str, power: int = 1) -> "LaurentPoly":
        exps = [0] * len(self.variables)
        exps[self.index(name)] = power
        return LaurentPoly(self, {tuple(exps): 1})

    def parse(self, text: str) -> "LaurentPoly":
        return LaurentPoly.parse(text, self)


class LaurentPoly:
    """
    Element of a RingSpec: a map exponent vector -> nonzero integer.

    Instances are treated as immutable. Arithmetic with plain ints is allowed,
    the int being read as a constant of the same ring.
    """

    __slots__ = ("ring", "terms")

    def __init__(self, ring: RingSpec, terms: Mapping[Tuple[int, ...], int]):
        clean = {}
        width = len(ring.variables)
        for exps, coef in terms.items():
            if coef == 0:
                continue
            exps = tuple(exps)
            if len(exps) != width:
                raise ValueError(f"Exponent vector {exps} does not match ring {ring.describe()}")
            for name, e in zip(ring.variables, exps):
                if e < 0 and name not in ring.invertible:
                    raise ValueError(f"Negative power of non-invertible variable '{name}'")
            clean[exps] = int(coef)
        self.ring = ring
        self.terms: Dict[Tuple[int, ...], int] = clean

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, ring: RingSpec, value: int) -> "LaurentPoly":
        return cls(ring, {(0,) * len(ring.variables): value})

    @classmethod
    def parse(cls, text: str, ring: RingSpec) -> "LaurentPoly":
        """
        Parse the textual form, e.g. ``2*a*c^-1 + b``.

        Grammar: a sum of terms, each term an optional integer coefficient
        followed by ``*``-separated factors ``name`` or ``name^k`` (k may be
        negative for invertible variables). Parentheses are accepted and
        expanded.
        """
        text = text.strip()
        if not text:
            raise ValueError("Empty polynomial text")
        symbols = {name: sympy.Symbol(name) for name in ring.variables}
        try:
            expr = parse_expr(text, local_dict=symbols, transformations=_TRANSFORMATIONS)
        except (SyntaxError, TypeError, sympy.SympifyError) as e:
            raise ValueError(f"Cannot parse polynomial '{text}': {e}") from e
        return cls.from_sympy(expr, ring)

    @classmethod
    def from_sympy(cls, expr, ring: RingSpec) -> "LaurentPoly":
        expr = sympy.expand(sympy.sympify(expr))
        unknown = {str(s) for s in expr.free_symbols} - set(ring.variables)
        if unknown:
            raise ValueError(f"Unknown variables {sorted(unknown)} for ring {ring.describe()}")
        terms: Dict[Tuple[int, ...], int] = {}
        for term in sympy.Add.make_args(expr):
            if term == 0:
                continue
            coef, rest = term.as_coeff_Mul()
            if not coef.is_Integer:
                raise ValueError(f"Non-integer coefficient {coef} in '{expr}'")
            exps = [0] * len(ring.variables)
            if rest != 1:
                for base, power in rest.as_powers_dict().items():
                    if not base.is_Symbol or not power.is_Integer:
                        raise ValueError(f"Not a Laurent monomial: {rest}")
                    exps[ring.index(str(base))] += int(power)
            key = tuple(exps)
            terms[key] = terms.get(key, 0) + int(coef)
        return cls(ring, terms)

    def to_sympy(self):
        symbols = [sympy.Symbol(v) for v in self.ring.variables]
        total = sympy.Integer(0)
        for exps, coef in self.terms.items():
            mono = sympy.Integer(coef)
            for sym, e in zip(symbols, exps):
                mono *= sym ** e
            total += mono
        return total

    # -- predicates -------------------------------------------------------

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            if other.ring != self.ring:
                raise RingMismatchError(f"{self.ring.describe()} vs {other.ring.describe()}")
            return other
        if isinstance(other, int):
            return LaurentPoly.constant(self.ring, other)
        if isinstance(other, Fraction) and other.denominator == 1:
            return LaurentPoly.constant(self.ring, other.numerator)
        return NotImplemented

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or set(self.terms) == {(0,) * len(self.ring.variables)}

    def constant_value(self) -> int:
        return self.terms.get((0,) * len(self.ring.variables), 0)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_unit(self) -> bool:
        """True for ±monomials built from invertible variables only."""
        if len(self.terms) != 1:
            return False
        (exps, coef), = self.terms.items()
        if coef not in (1, -1):
            return False
        return all(e == 0 or name in self.ring.invertible for name, e in zip(self.ring.variables, exps))

    def single_variable(self) -> Optional[str]:
        """Name of v when self == v, else None."""
        if len(self.terms) != 1:
            return None
        (exps, coef), = self.terms.items()
        if coef != 1 or sorted(exps) != [0] * (len(exps) - 1) + [1]:
            return None
        return self.ring.variables[exps.index(1)]

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for exps, coef in other.terms.items():
            terms[exps] = terms.get(exps, 0) + coef
        return LaurentPoly(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: Dict[Tuple[int, ...], int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                key = tuple(x + y for x, y in zip(e1, e2))
                terms[key] = terms.get(key, 0) + c1 * c2
        return LaurentPoly(self.ring, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> "LaurentPoly":
        if not self.is_unit():
            raise DivisionError(f"{self} is not a unit of {self.ring.describe()}")
        (exps, coef), = self.terms.items()
        return LaurentPoly(self.ring, {tuple(-e for e in exps): coef})

    def divide_exact(self, divisor: "LaurentPoly") -> "LaurentPoly":
        """Divide by a monomial; fails unless the quotient stays in the ring."""
        divisor = self._coerce(divisor)
        if not divisor.is_monomial():
            raise DivisionError(f"Only monomial divisors are supported, got {divisor}")
        (dexps, dcoef), = divisor.terms.items()
        terms = {}
        for exps, coef in self.terms.items():
            if coef % dcoef:
                raise DivisionError(f"{self} is not divisible by {divisor}")
            key = tuple(x - y for x, y in zip(exps, dexps))
            for name, e in zip(self.ring.variables, key):
                if e < 0 and name not in self.ring.invertible:
                    raise DivisionError(f"{self} is not divisible by {divisor}")
            terms[key] = coef // dcoef
        return LaurentPoly(self.ring, terms)

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        # constants compare equal to ints, so they must hash like them
        if self.is_constant():
            return hash(self.constant_value())
        return hash((self.ring, frozenset(self.terms.items())))

    # -- evaluation -------------------------------------------------------

    def substitute(self, values: Mapping[str, object], one=1):
        """Evaluate with variable values taken from any commutative ring."""
        total = one * 0
        for exps, coef in self.terms.items():
            mono = one * coef
            for name, e in zip(self.ring.variables, exps):
                if e:
                    mono = mono * values[name] ** e
            total = total + mono
        return total

    def specialize(self, spec: "Specialization") -> Fraction:
        if spec.ring != self.ring:
            raise RingMismatchError(f"{self.ring.describe()} vs {spec.ring.describe()}")
        return Fraction(self.substitute(spec.values, Fraction(1)))

    # -- text -------------------------------------------------------------

    def sorted_terms(self) -> Iterable[Tuple[Tuple[int, ...], int]]:
        """Terms in canonical graded-lexicographic order, highest first."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for exps, coef in self.sorted_terms():
            factors = []
            for name, e in zip(self.ring.variables, exps):
                if e == 1:
                    factors.append(name)
                elif e:
                    factors.append(f"{name}^{e}")
            mono = "*".join(factors)
            magnitude = abs(coef)
            if not mono:
                body = str(magnitude)
            elif magnitude == 1:
                body = mono
            else:
                body = f"{magnitude}*{mono}"
            if not pieces:
                pieces.append(body if coef > 0 else f"-{body}")
            else:
                pieces.append(f"+ {body}" if coef > 0 else f"- {body}")
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"


def lp_add(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    if p.ring != q.ring:
        raise RingMismatchError(f"{p.ring.describe()} vs {q.ring.describe()}")
    return p + q


def lp_mul(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    if p.ring != q.ring:
        raise RingMismatchError(f"{p.ring.describe()} vs {q.ring.describe()}")
    return p * q


def lp_specialize(p: LaurentPoly, s: "Specialization") -> Fraction:
    return p.specialize(s)


def parse_rational(text: Union[str, int, Fraction]) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"Not a rational number: '{text}'") from e


@dataclass(frozen=True)
class Specialization:
    """
    Total assignment of rationals to the variables of a ring.

    Args:
        ring: The ring being specialized
        values: variable -> rational; invertible variables must be nonzero
    """

    ring: RingSpec
    values: Mapping[str, Fraction]

    def __post_init__(self):
        values = {name: parse_rational(v) for name, v in dict(self.values).items()}
        missing = set(self.ring.variables) - set(values)
        if missing:
            raise ValueError(f"Specialization is missing {sorted(missing)}")
        extra = set(values) - set(self.ring.variables)
        if extra:
            raise ValueError(f"Specialization has unknown variables {sorted(extra)}")
        for name in self.ring.invertible:
            if values[name] == 0:
                raise ValueError(f"Invertible variable '{name}' specialized to 0")
        ordered = {name: values[name] for name in self.ring.variables}
        object.__setattr__(self, "values", ordered)

    def __hash__(self):
        return hash((self.ring, tuple(self.values.items())))

    @classmethod
    def random(cls, ring: RingSpec, seed: int) -> "Specialization":
        """Seeded random point with numerators and denominators in [1, 100]."""
        rng = random.Random(seed)
        values = {name: Fraction(rng.randint(1, 100), rng.randint(1, 100)) for name in ring.variables}
        logger.debug(f"Random specialization (seed={seed}): {values}")
        return cls(ring, values)

    @classmethod
    def parse(cls, text: str, ring: RingSpec) -> "Specialization":
        """Parse ``a=1/2, b=0, c=3``."""
        values = {}
        for item in text.replace(";", ",").split(","):
            item = item.strip()
            if not item:
                continue
            if "=" not in item:
                raise ValueError(f"Expected name=value, got '{item}'")
            name, value = item.split("=", 1)
            values[name.strip()] = parse_rational(value.strip())
        return cls(ring, values)

    def as_strings(self) -> Dict[str, str]:
        return {name: str(value) for name, value in self.values.items()}

    def __str__(self) -> str:
        return ", ".join(f"{k}={v}" for k, v in self.as_strings().items())

    def fingerprint(self) -> str:
        return hashlib.sha256(str(self).encode()).hexdigest()[:16]


def phi_specialization(spec: Specialization) -> Specialization:
    """
    Twin point under the ring automorphism a -> -b/c, b -> -a/c, c -> 1/c, d -> -d/e, e -> 1/e.

    Variables outside {a, b, c, d, e} are kept.
    """
    v = dict(spec.values)
    twin = dict(v)
    if "c" in v:
        if "a" in v and "b" in v:
            twin["a"] = -v["b"] / v["c"]
            twin["b"] = -v["a"] / v["c"]
        twin["c"] = 1 / v["c"]
    if "e" in v:
        if "d" in v:
            twin["d"] = -v["d"] / v["e"]
        twin["e"] = 1 / v["e"]
    return Specialization(spec.ring, twin)


@dataclass(frozen=True)
class CycloQ3:
    """r0 + r1*j in Q(j), where j^2 = -1 - j."""

    r0: Fraction = Fraction(0)
    r1: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "r0", Fraction(self.r0))
        object.__setattr__(self, "r1", Fraction(self.r1))

    @staticmethod
    def _coerce(other) -> "CycloQ3":
        if isinstance(other, CycloQ3):
            return other
        if isinstance(other, (int, Fraction)):
            return CycloQ3(Fraction(other), Fraction(0))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycloQ3(self.r0 + other.r0, self.r1 + other.r1)

    __radd__ = __add__

    def __neg__(self):
        return CycloQ3(-self.r0, -self.r1)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycloQ3(self.r0 - other.r0, self.r1 - other.r1)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a0, a1, b0, b1 = self.r0, self.r1, other.r0, other.r1
        return CycloQ3(a0 * b0 - a1 * b1, a0 * b1 + a1 * b0 - a1 * b1)

    __rmul__ = __mul__

    def conjugate(self) -> "CycloQ3":
        return CycloQ3(self.r0 - self.r1, -self.r1)

    def norm(self) -> Fraction:
        return self.r0 * self.r0 - self.r0 * self.r1 + self.r1 * self.r1

    def inverse(self) -> "CycloQ3":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("Inverse of 0 in Q(j)")
        c = self.conjugate()
        return CycloQ3(c.r0 / n, c.r1 / n)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        base = self if k >= 0 else self.inverse()
        result = CycloQ3(1)
        for _ in range(abs(k)):
            result = result * base
        return result

    def __bool__(self) -> bool:
        return bool(self.r0) or bool(self.r1)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.r0 == other.r0 and self.r1 == other.r1

    def __hash__(self):
        if not self.r1:
            return hash(self.r0)
        return hash((self.r0, self.r1))

    def __str__(self) -> str:
        if not self.r1:
            return str(self.r0)
        j_part = "j" if self.r1 == 1 else "-j" if self.r1 == -1 else f"{self.r1}*j"
        if not self.r0:
            return j_part
        if j_part.startswith("-"):
            return f"{self.r0} - {j_part[1:]}"
        return f"{self.r0} + {j_part}"

    __repr__ = __str__


J = CycloQ3(0, 1)


def cy_mul(u: CycloQ3, v: CycloQ3) -> CycloQ3:
    return u * v


def cy_inv(u: CycloQ3) -> CycloQ3:
    return u.inverse()
