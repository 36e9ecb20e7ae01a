"""Words in braid generators, their linear combinations, and window reduction of generator powers."""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Tuple

from .coeff import DivisionError, LaurentPoly, RingSpec, parse_rational

# Set up logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

Letter = Tuple[str, int]

_WORD_TOKEN = re.compile(r"\s*(?:(\()|(\))(?:\^(-?\d+))?|([A-Za-z][A-Za-z0-9_]*)(?:\^(-?\d+))?|(1)(?![0-9]))")


def _merge(letters: Iterable[Letter]) -> Tuple[Letter, ...]:
    out: List[Letter] = []
    for gen, exp in letters:
        if exp == 0:
            continue
        if out and out[-1][0] == gen:
            merged = out[-1][1] + exp
            out.pop()
            if merged:
                out.append((gen, merged))
        else:
            out.append((gen, exp))
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """
    Reduced word: adjacent letters never share a generator and no exponent is 0.

    The empty word is the identity.
    """

    letters: Tuple[Letter, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", _merge((str(g), int(e)) for g, e in self.letters))

    @classmethod
    def gen(cls, name: str, exp: int = 1) -> "Word":
        return cls(((name, exp),))

    @classmethod
    def parse(cls, text: str) -> "Word":
        """
        Parse ``t s2 s1^-1 s2 t``.

        Tokens are generator names with an optional ``^k``, the literal ``1``
        for the identity, and parenthesised groups with an optional power,
        e.g. ``(s1^2 s2^2)^6``.
        """
        stack: List[List[Letter]] = [[]]
        pos = 0
        text = text.strip()
        while pos < len(text):
            match = _WORD_TOKEN.match(text, pos)
            if not match or match.end() == pos:
                raise ValueError(f"Cannot parse word '{text}' at offset {pos}")
            pos = match.end()
            opening, closing, group_power, name, power, identity = match.groups()
            if opening:
                stack.append([])
            elif closing:
                if len(stack) == 1:
                    raise ValueError(f"Unbalanced ')' in word '{text}'")
                inner = Word(tuple(stack.pop()))
                k = int(group_power) if group_power else 1
                stack[-1].extend(inner.power(k).letters)
            elif name:
                stack[-1].append((name, int(power) if power else 1))
            elif identity:
                continue
        if len(stack) != 1:
            raise ValueError(f"Unbalanced '(' in word '{text}'")
        return cls(tuple(stack[0]))

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        return " ".join(g if e == 1 else f"{g}^{e}" for g, e in self.letters)

    def __repr__(self) -> str:
        return f"Word({self})"

    def __mul__(self, other: "Word") -> "Word":
        if not isinstance(other, Word):
            return NotImplemented
        return word_mul(self, other)

    def __len__(self) -> int:
        return len(self.letters)

    def is_identity(self) -> bool:
        return not self.letters

    @property
    def degree(self) -> int:
        return sum(abs(e) for _, e in self.letters)

    def sort_key(self):
        return (self.degree, self.letters)

    def __lt__(self, other: "Word") -> bool:
        return self.sort_key() < other.sort_key()

    def expand(self) -> Tuple[Letter, ...]:
        """Unit-letter sequence: s1^2 s2^-1 -> (s1,1) (s1,1) (s2,-1)."""
        out: List[Letter] = []
        for g, e in self.letters:
            out.extend([(g, 1 if e > 0 else -1)] * abs(e))
        return tuple(out)

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def phi(self) -> "Word":
        """Invert every letter in place: s1 t^-1 -> s1^-1 t."""
        return Word(tuple((g, -e) for g, e in self.letters))

    def power(self, k: int) -> "Word":
        base = self if k >= 0 else self.inverse()
        return Word(base.letters * abs(k))

    def generators(self) -> set:
        return {g for g, _ in self.letters}


def word_mul(u: Word, v: Word) -> Word:
    return Word(u.letters + v.letters)


def _is_zero(c) -> bool:
    return not c


class AlgebraElement:
    """
    Finite linear combination of words; no zero coefficients are stored.

    Coefficients are LaurentPoly elements or rationals; mixing with plain ints
    is allowed.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Word, object]] = None):
        self.terms: Dict[Word, object] = {}
        for w, c in (terms or {}).items():
            if not _is_zero(c):
                self.terms[w] = c

    @classmethod
    def of(cls, word: Word, coef=1) -> "AlgebraElement":
        return cls({word: coef})

    @classmethod
    def scalar(cls, coef) -> "AlgebraElement":
        return cls({Word(): coef})

    @classmethod
    def parse(cls, text: str, ring: Optional[RingSpec] = None) -> "AlgebraElement":
        """
        Parse ``[c] s1^2 s2 - [a*c^-1] t + s1``.

        Bracketed coefficients use the polynomial grammar of ``ring`` (or are
        rationals when no ring is given); a missing coefficient is 1 and a
        missing word is the identity. ``0`` is the zero element.
        """
        text = text.strip()
        if text == "0":
            return cls()
        terms: Dict[Word, object] = {}
        for sign, body in _split_terms(text):
            body = body.strip()
            coef_text = None
            if body.startswith("["):
                close = body.index("]")
                coef_text = body[1:close]
                body = body[close + 1:]
            if coef_text is None:
                coef = ring.one() if ring is not None else Fraction(1)
            elif ring is not None:
                coef = LaurentPoly.parse(coef_text, ring)
            else:
                coef = parse_rational(coef_text.strip())
            if sign < 0:
                coef = -coef
            word = Word.parse(body) if body.strip() else Word()
            terms[word] = terms[word] + coef if word in terms else coef
        return cls(terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self) -> List[Tuple[Word, object]]:
        """Terms in canonical word order; steps of a trace index into this list."""
        return sorted(self.terms.items(), key=lambda t: t[0].sort_key())

    def coefficient(self, word: Word, default=0):
        return self.terms.get(word, default)

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        terms = dict(self.terms)
        for w, c in other.terms.items():
            terms[w] = terms[w] + c if w in terms else c
        return AlgebraElement(terms)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement({w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self + (-other)

    def scale(self, coef) -> "AlgebraElement":
        return AlgebraElement({w: coef * c for w, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return elem_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(frozenset(self.terms))

    def map_coefficients(self, f: Callable) -> "AlgebraElement":
        return AlgebraElement({w: f(c) for w, c in self.terms.items()})

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"[{c}] {w}" for w, c in self.sorted_terms())

    def __repr__(self) -> str:
        return f"AlgebraElement({self})"


def _split_terms(text: str) -> List[Tuple[int, str]]:
    """Split at top-level '+'/'-' signs; '^-' inside exponents is not a sign."""
    parts: List[Tuple[int, str]] = []
    depth = 0
    sign = 1
    start = 0
    for i, ch in enumerate(text):
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        elif depth == 0 and ch in "+-" and (i == 0 or text[i - 1] != "^"):
            chunk = text[start:i]
            if chunk.strip():
                parts.append((sign, chunk))
                sign = 1
            sign = sign * (-1 if ch == "-" else 1)
            start = i + 1
    chunk = text[start:]
    if chunk.strip():
        parts.append((sign, chunk))
    if not parts:
        raise ValueError(f"Empty algebra element '{text}'")
    return parts


def elem_mul(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    terms: Dict[Word, object] = {}
    for w1, c1 in x.terms.items():
        for w2, c2 in y.terms.items():
            w = word_mul(w1, w2)
            c = c1 * c2
            terms[w] = terms[w] + c if w in terms else c
    return AlgebraElement(terms)


def _invert(c):
    if isinstance(c, LaurentPoly):
        return c.inverse()
    if c == 0:
        raise DivisionError("Order relation has zero constant term")
    return Fraction(1) / Fraction(c)


@dataclass(frozen=True)
class OrderRule:
    """
    Monic order relation g^n = c_0 + c_1 g + ... + c_{n-1} g^(n-1).

    The canonical window of exponents is [low, high] with 0 absorbed.
    """

    generator: str
    coefficients: Tuple[object, ...]

    @property
    def order(self) -> int:
        return len(self.coefficients)

    @property
    def low(self) -> int:
        return -((self.order - 1) // 2)

    @property
    def high(self) -> int:
        return self.order // 2

    def in_window(self, exp: int) -> bool:
        return self.low <= exp <= self.high

    def rewrite(self, exp: int) -> List[Tuple[int, object]]:
        """One rewriting step for g^exp outside the window."""
        n = self.order
        if exp > self.high:
            return [(exp - n + i, c) for i, c in enumerate(self.coefficients) if not _is_zero(c)]
        if exp < self.low:
            inv = _invert(self.coefficients[0])
            out = [(exp + n, inv)]
            out.extend((exp + i, -(inv * c)) for i, c in enumerate(self.coefficients) if i and not _is_zero(c))
            return out
        return [(exp, 1)]

    def map_coefficients(self, f: Callable) -> "OrderRule":
        return OrderRule(self.generator, tuple(f(c) for c in self.coefficients))


@dataclass(frozen=True)
class WindowPolicy:
    """Order rules per generator; generators without a rule are left alone."""

    rules: Tuple[OrderRule, ...]

    def rule(self, gen: str) -> Optional[OrderRule]:
        for r in self.rules:
            if r.generator == gen:
                return r
        return None

    def in_window(self, gen: str, exp: int) -> bool:
        r = self.rule(gen)
        return r is None or r.in_window(exp)

    def is_reduced(self, word: Word) -> bool:
        return all(self.in_window(g, e) for g, e in word.letters)

    def specialize(self, f: Callable) -> "WindowPolicy":
        return WindowPolicy(tuple(r.map_coefficients(f) for r in self.rules))


def reduce_word(word: Word, policy: WindowPolicy, coef=1) -> Dict[Word, object]:
    """Window-reduce a single term; the leftmost out-of-window letter is rewritten first."""
    out: Dict[Word, object] = {}
    stack: List[Tuple[Word, object]] = [(word, coef)]
    while stack:
        w, c = stack.pop()
        if _is_zero(c):
            continue
        for idx, (gen, exp) in enumerate(w.letters):
            if not policy.in_window(gen, exp):
                prefix = w.letters[:idx]
                suffix = w.letters[idx + 1:]
                for new_exp, k in policy.rule(gen).rewrite(exp):
                    stack.append((Word(prefix + ((gen, new_exp),) + suffix), c * k))
                break
        else:
            out[w] = out[w] + c if w in out else c
    return {w: c for w, c in out.items() if not _is_zero(c)}


def window_reduce(x: AlgebraElement, policy: WindowPolicy) -> AlgebraElement:
    terms: Dict[Word, object] = {}
    for w, c in x.terms.items():
        for rw, rc in reduce_word(w, policy, c).items():
            terms[rw] = terms[rw] + rc if rw in terms else rc
    return AlgebraElement(terms)
