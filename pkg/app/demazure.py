"""Q(j)[x, y] with the G4 reflection action and its Demazure operators."""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

from .coeff import J, CycloQ3
from .reports import Certificate

# Set up logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

Monomial = Tuple[int, int]


class NotDivisibleError(ArithmeticError):
    """Polynomial is not a multiple of the linear form."""

    def __init__(self, remainder: "Poly2", form: "LinearForm"):
        super().__init__(f"remainder {remainder} after division by {form}")
        self.remainder = remainder


class Poly2:
    """Polynomial in x, y over Q(j): map (i, k) -> coefficient of x^i y^k."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[Monomial, CycloQ3]] = None):
        self.terms: Dict[Monomial, CycloQ3] = {}
        for m, c in (terms or {}).items():
            c = c if isinstance(c, CycloQ3) else CycloQ3(c)
            if c:
                self.terms[m] = c

    @classmethod
    def monomial(cls, i: int, k: int, coef=1) -> "Poly2":
        return cls({(i, k): coef})

    @classmethod
    def linear(cls, cx, cy) -> "Poly2":
        return cls({(1, 0): cx, (0, 1): cy})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "Poly2") -> "Poly2":
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms[m] + c if m in terms else c
        return Poly2(terms)

    def __neg__(self) -> "Poly2":
        return Poly2({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly2") -> "Poly2":
        return self + (-other)

    def __mul__(self, other) -> "Poly2":
        if not isinstance(other, Poly2):
            return Poly2({m: c * other for m, c in self.terms.items()})
        terms: Dict[Monomial, CycloQ3] = {}
        for (i1, k1), c1 in self.terms.items():
            for (i2, k2), c2 in other.terms.items():
                m = (i1 + i2, k1 + k2)
                terms[m] = terms[m] + c1 * c2 if m in terms else c1 * c2
        return Poly2(terms)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly2":
        result = Poly2.monomial(0, 0)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly2):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def degree(self) -> int:
        return max((i + k for i, k in self.terms), default=-1)

    def coefficient(self, i: int, k: int) -> CycloQ3:
        return self.terms.get((i, k), CycloQ3(0))

    def leading(self) -> Monomial:
        """Largest monomial in graded-lex order with y > x."""
        return max(self.terms, key=lambda m: (m[0] + m[1], m[1]))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for (i, k) in sorted(self.terms, key=lambda m: (m[0] + m[1], m[1]), reverse=True):
            mono = "*".join(p for p in (_power("x", i), _power("y", k)) if p)
            coef = f"({self.terms[(i, k)]})"
            pieces.append(f"{coef}*{mono}" if mono else coef)
        return " + ".join(pieces)

    __repr__ = __str__


def _power(name: str, n: int) -> str:
    return "" if n == 0 else name if n == 1 else f"{name}^{n}"


X = Poly2.monomial(1, 0)
Y = Poly2.monomial(0, 1)


@dataclass(frozen=True)
class LinearForm:
    """alpha*x + beta*y, a root of one reflection."""

    alpha: CycloQ3
    beta: CycloQ3

    def poly(self) -> Poly2:
        return Poly2.linear(self.alpha, self.beta)

    def __str__(self) -> str:
        return str(self.poly())


@dataclass(frozen=True)
class ReflectionAction:
    """
    Linear map on V = span(x, y) extended to an algebra automorphism of Q(j)[x, y].

    ``image_x`` and ``image_y`` are the columns of the matrix.
    """

    name: str
    image_x: Tuple[CycloQ3, CycloQ3]
    image_y: Tuple[CycloQ3, CycloQ3]
    root: LinearForm

    def apply(self, p: Poly2) -> Poly2:
        sx = Poly2.linear(*self.image_x)
        sy = Poly2.linear(*self.image_y)
        x_powers = [Poly2.monomial(0, 0)]
        y_powers = [Poly2.monomial(0, 0)]
        degree = max(p.degree(), 0)
        for _ in range(degree):
            x_powers.append(x_powers[-1] * sx)
            y_powers.append(y_powers[-1] * sy)
        result = Poly2()
        for (i, k), c in p.terms.items():
            result = result + x_powers[i] * y_powers[k] * c
        return result


_THIRD = Fraction(1, 3)
S1 = ReflectionAction("s1", (CycloQ3(1), CycloQ3(0)), (CycloQ3(0), J), LinearForm(CycloQ3(0), CycloQ3(1)))
S2 = ReflectionAction(
    "s2",
    ((J - J * J) * _THIRD, (4 * J + 2 * J * J) * _THIRD),
    ((2 * J + J * J) * _THIRD, (-J - 2 * J * J) * _THIRD),
    LinearForm(CycloQ3(1), CycloQ3(1)),
)
REFLECTIONS = {1: S1, 2: S2}


def reflect(i: int, p: Poly2) -> Poly2:
    return REFLECTIONS[i].apply(p)


def exact_divide(p: Poly2, form: LinearForm) -> Poly2:
    """q with q * form == p; raises NotDivisibleError carrying the remainder."""
    divisor = form.poly()
    lead = divisor.leading()
    lead_coef = divisor.terms[lead]
    rest = Poly2(dict(p.terms))
    quotient: Dict[Monomial, CycloQ3] = {}
    remainder: Dict[Monomial, CycloQ3] = {}
    while rest:
        m = rest.leading()
        c = rest.terms[m]
        if m[0] >= lead[0] and m[1] >= lead[1]:
            shift = (m[0] - lead[0], m[1] - lead[1])
            factor = c / lead_coef
            quotient[shift] = quotient.get(shift, CycloQ3(0)) + factor
            rest = rest - Poly2.monomial(*shift, factor) * divisor
        else:
            remainder[m] = c
            rest = Poly2({k: v for k, v in rest.terms.items() if k != m})
    if remainder:
        raise NotDivisibleError(Poly2(remainder), form)
    return Poly2(quotient)


def delta(i: int, p: Poly2) -> Poly2:
    """Demazure operator: (s_i(p) - p) / l_i."""
    return exact_divide(reflect(i, p) - p, REFLECTIONS[i].root)


def apply_deltas(sequence: Iterable[int], p: Poly2) -> Poly2:
    """delta_{i1} delta_{i2} ... p, the rightmost operator first."""
    for i in reversed(list(sequence)):
        p = delta(i, p)
    return p


def _j(a, b, c=0) -> CycloQ3:
    """a + b*j + c*j^2."""
    return CycloQ3(a) + J * b + J * J * c


# multiplier, input monomial, expected multiplier * delta_2(input)
DELTA2_TABLE: List[Tuple[int, Monomial, Poly2]] = [
    (3, (0, 1), Poly2.monomial(0, 0, _j(0, 2, 1))),
    (3, (1, 0), Poly2.monomial(0, 0, _j(0, 4, 2))),
    (3, (0, 2), Poly2.linear(_j(0, -1), -_j(3, 0, 1))),
    (3, (1, 1), Poly2.linear(_j(0, 0, 1), _j(-2, 0))),
    # x^2: the value forced by delta_2(p) * l_2 = s_2 p - p, not -4x - 4y
    (3, (2, 0), Poly2.linear(_j(-4, 0), _j(0, -4))),
    (9, (0, 3), Poly2({(2, 0): _j(0, 1, -1), (1, 1): -_j(0, 7, 2), (0, 2): _j(0, 10, 8)})),
    (9, (0, 4), Poly2({(3, 0): _j(0, 0, 1), (2, 1): _j(0, 4, -1), (1, 2): -_j(0, 10, 5), (0, 3): -_j(10, 0, 1)})),
]

TARGET_U = (3, Poly2.linear(_j(0, -2, 5), _j(0, 10, 8)))
TARGET_V = (9, Poly2.linear(_j(0, 4, -13), _j(0, -2, 2)))


def delta2_table() -> List[Dict[str, object]]:
    rows = []
    for multiplier, (i, k), expected in DELTA2_TABLE:
        got = delta(2, Poly2.monomial(i, k)) * multiplier
        rows.append({
            "input": str(Poly2.monomial(i, k)),
            "multiplier": multiplier,
            "computed": str(got),
            "expected": str(expected),
            "match": got == expected,
        })
    return rows


def braid_failure_check() -> Certificate:
    """
    delta1 delta2 delta1 and delta2 delta1 delta2 differ by more than a scalar.

    Both sides applied to y^4 give linear forms u and v; a nonzero
    determinant of (u | v) shows they are not proportional.
    """
    y4 = Poly2.monomial(0, 4)
    u = apply_deltas([1, 2, 1], y4)
    v = apply_deltas([2, 1, 2], y4)
    det = u.coefficient(1, 0) * v.coefficient(0, 1) - u.coefficient(0, 1) * v.coefficient(1, 0)
    table = delta2_table()
    u_ok = u * TARGET_U[0] == TARGET_U[1]
    v_ok = v * TARGET_V[0] == TARGET_V[1]
    details = {
        "u": str(u), "v": str(v),
        "3u": str(u * 3), "9v": str(v * 9),
        "u_matches": u_ok, "v_matches": v_ok,
        "determinant": str(det),
        "delta2_table": table,
    }
    certified = u_ok and v_ok and bool(det) and all(row["match"] for row in table)
    if not certified:
        logger.error(f"❌ Demazure check failed: {details}")
        return Certificate(name="demazure", certified=False, error="Demazure targets not reproduced",
                           details=details)
    logger.info(f"✅ Demazure braid relation fails: det(u|v) = {det}")
    return Certificate(name="demazure", certified=True, details=details)


def monomials(max_degree: int) -> List[Poly2]:
    return [Poly2.monomial(i, n - i) for n in range(max_degree + 1) for i in range(n + 1)]


def nilpotency_check(max_degree: int = 12) -> Certificate:
    """delta_i^3 kills every monomial of degree <= max_degree."""
    for i in (1, 2):
        for m in monomials(max_degree):
            image = apply_deltas([i, i, i], m)
            if image:
                return Certificate(name="demazure-nilpotency", certified=False,
                                   error=f"delta_{i}^3 does not kill {m}",
                                   counterexample={"operator": i, "monomial": str(m), "image": str(image)})
    return Certificate(name="demazure-nilpotency", certified=True, details={"max_degree": max_degree})


def reflection_order_check(max_degree: int = 12) -> Certificate:
    """s_i^3 = id on monomials and l_i is a j-eigenvector of s_i."""
    for i, s in REFLECTIONS.items():
        root = s.root.poly()
        if reflect(i, root) != root * J:
            return Certificate(name="reflection-order", certified=False,
                               error=f"root of s{i} is not a j-eigenvector")
        for m in monomials(max_degree):
            if reflect(i, reflect(i, reflect(i, m))) != m:
                return Certificate(name="reflection-order", certified=False,
                                   error=f"s{i}^3 moves {m}", counterexample={"monomial": str(m)})
    fixed = {"s1": reflect(1, X) == X, "s2": reflect(2, X - Y * 2) == X - Y * 2}
    if not all(fixed.values()):
        return Certificate(name="reflection-order", certified=False, error="reflecting hyperplane not fixed",
                           details={"hyperplanes_fixed": fixed})
    return Certificate(name="reflection-order", certified=True,
                       details={"max_degree": max_degree, "hyperplanes_fixed": fixed})


def leibniz_check(samples: int = 20, seed: int = 7, max_degree: int = 5) -> Certificate:
    """delta_i(pq) = delta_i(p) q + s_i(p) delta_i(q) on seeded random polynomials."""
    rng = random.Random(seed)

    def sample() -> Poly2:
        return Poly2({(rng.randint(0, max_degree), rng.randint(0, max_degree)):
                      CycloQ3(rng.randint(-5, 5), rng.randint(-5, 5)) for _ in range(3)})

    for n in range(samples):
        p, q = sample(), sample()
        for i in (1, 2):
            lhs = delta(i, p * q)
            rhs = delta(i, p) * q + reflect(i, p) * delta(i, q)
            if lhs != rhs:
                return Certificate(name="demazure-leibniz", certified=False,
                                   error=f"twisted Leibniz rule fails for delta_{i}",
                                   counterexample={"p": str(p), "q": str(q)})
    return Certificate(name="demazure-leibniz", certified=True, details={"samples": samples, "seed": seed})


def demazure_certificates(max_degree: int = 12, seed: int = 7) -> List[Certificate]:
    return [
        braid_failure_check(),
        nilpotency_check(max_degree),
        reflection_order_check(max_degree),
        leibniz_check(seed=seed),
    ]
