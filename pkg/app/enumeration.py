"""
Vector enumeration of the regular module of a finitely presented algebra.

The algebra is given by a Presentation specialized at a rational point. The
enumerator grows a table of right actions e_b . g on window-reduced words b,
imposes every relation at every basis word and retires words through linear
coincidences, until the table closes. The result is a word basis together
with the matrices of the generators (row-vector convention, so that
M(w1 w2) = M(w1) M(w2)).
"""

import heapq
import json
import logging
import os
import re
import time
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Deque, Dict, List, Optional, Tuple, Union

import numpy as np
import psutil

from .coeff import LaurentPoly, RingSpec, Specialization
from .freealg import AlgebraElement, Word, reduce_word
from .linalg import DENSE_LIMIT, SparseMatrix, SparseVector, axpy, fraction_str, vec_sub
from .presentations import Presentation, coefficient_map
from .reports import Certificate

# Set up logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

DEFAULT_MAX_DIM = 50000
DEFAULT_MAX_LEN = 64
SWEEP_EVERY = 32
CHECKPOINT_EVERY = 5000
ONE = Fraction(1)


class BudgetExceededError(RuntimeError):
    """Enumeration exceeded its dimension or word-length budget."""

    def __init__(self, message: str, live: int, frontier: int):
        super().__init__(f"{message} (live dimension {live}, frontier {frontier})")
        self.live = live
        self.frontier = frontier


class CheckpointError(ValueError):
    """Checkpoint does not belong to this enumeration."""


@dataclass
class EnumerationResult:
    """Certified word basis and generator matrices at one specialization."""

    presentation: str
    generators: Tuple[str, ...]
    basis: List[Word]
    matrices: Dict[str, SparseMatrix]
    specialization: Specialization
    seed: Optional[int] = None
    max_length: int = 0
    timings: Dict[str, float] = field(default_factory=dict)
    stats: Dict[str, int] = field(default_factory=dict)
    order_relations: Dict[str, List[Fraction]] = field(default_factory=dict)
    _positions: Dict[Word, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._positions = {w: i for i, w in enumerate(self.basis)}

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def unit_vector(self) -> SparseVector:
        """Coordinates of the identity word."""
        return {self._positions[Word()]: ONE} if Word() in self._positions else {}

    def position(self, word: Word) -> Optional[int]:
        return self._positions.get(word)

    def to_json(self) -> Dict[str, object]:
        ring = self.specialization.ring
        return {
            "presentation": self.presentation,
            "generators": list(self.generators),
            "dimension": self.dimension,
            "basis": [str(w) for w in self.basis],
            "matrices": {g: m.triplets() for g, m in self.matrices.items()},
            "ring": {"variables": list(ring.variables), "invertible": sorted(ring.invertible)},
            "specialization": self.specialization.as_strings(),
            "order_relations": {g: [fraction_str(c) for c in cs] for g, cs in self.order_relations.items()},
            "seed": self.seed,
            "max_length": self.max_length,
            "stats": self.stats,
            "timings": self.timings,
        }

    @classmethod
    def from_json(cls, data: Dict[str, object]) -> "EnumerationResult":
        ring = RingSpec(tuple(data["ring"]["variables"]), frozenset(data["ring"]["invertible"]))
        n = int(data["dimension"])
        return cls(
            presentation=data["presentation"],
            generators=tuple(data["generators"]),
            basis=[Word.parse(w) for w in data["basis"]],
            matrices={g: SparseMatrix.from_triplets(n, t) for g, t in data["matrices"].items()},
            specialization=Specialization(ring, data["specialization"]),
            seed=data.get("seed"),
            max_length=int(data.get("max_length", 0)),
            timings=dict(data.get("timings", {})),
            stats=dict(data.get("stats", {})),
            order_relations={g: [Fraction(c) for c in cs] for g, cs in data.get("order_relations", {}).items()},
        )

    def save(self, path: Union[str, Path]) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(json.dumps(self.to_json()))
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "EnumerationResult":
        return cls.from_json(json.loads(Path(path).read_text()))


class VectorEnumerator:
    """
    Breadth-first vector enumeration over Q.

    Args:
        presentation: Algebra to enumerate; its order constants must be units
        spec: Rational point for the ring parameters
        max_dim: Budget on the live dimension
        max_len: Budget on the length of defined words
        sweep_every: Relations are pushed after this many definitions
        progress_callback: Optional ``callback(message, progress)``
        checkpoint_path: JSON file written every ``checkpoint_every`` definitions
    """

    def __init__(self, presentation: Presentation, spec: Specialization,
                 max_dim: int = DEFAULT_MAX_DIM, max_len: int = DEFAULT_MAX_LEN,
                 sweep_every: int = SWEEP_EVERY, progress_callback: Optional[Callable[[str, int], None]] = None,
                 checkpoint_path: Optional[Union[str, Path]] = None, checkpoint_every: int = CHECKPOINT_EVERY):
        if presentation.non_unital_constant:
            raise ValueError(f"{presentation.name} has a non-invertible order constant and cannot be enumerated")
        self.presentation = presentation
        self.spec = spec
        self.max_dim = max_dim
        self.max_len = max_len
        self.sweep_every = sweep_every
        self.progress_callback = progress_callback
        self.checkpoint_path = Path(checkpoint_path) if checkpoint_path else None
        self.checkpoint_every = checkpoint_every

        self.generators = presentation.generators
        self.policy = presentation.specialized_policy(spec)
        self.relations = presentation.relations(coefficient_map(spec))

        self.words: List[Word] = []
        self.index: Dict[Word, int] = {}
        self.table: Dict[int, Dict[str, SparseVector]] = {}
        self.retired: Dict[int, SparseVector] = {}
        self.todo: Dict[int, List[int]] = {}
        self.frontier: List[Tuple[tuple, int, int]] = []
        self.pending: Deque[SparseVector] = deque()
        self.definitions = 0
        self.coincidences = 0
        self.live = 0
        self.max_length = 0
        self._lookup(Word())

    # -- word store -------------------------------------------------------

    def _lookup(self, word: Word) -> int:
        found = self.index.get(word)
        if found is not None:
            return found
        if word.degree > self.max_len:
            raise BudgetExceededError(f"word '{word}' exceeds max_len={self.max_len}", self.live, len(self.frontier))
        k = len(self.words)
        self.words.append(word)
        self.index[word] = k
        self.table[k] = {}
        self.todo[k] = list(range(len(self.relations)))
        key = word.sort_key()
        for gi in range(len(self.generators)):
            heapq.heappush(self.frontier, (key, gi, k))
        self.live += 1
        self.max_length = max(self.max_length, word.degree)
        if self.live > self.max_dim:
            raise BudgetExceededError(f"live dimension exceeds max_dim={self.max_dim}", self.live, len(self.frontier))
        return k

    def _normalize(self, vec: SparseVector) -> SparseVector:
        """Rewrite retired ids through their expressions, highest id first."""
        vec = {k: c for k, c in vec.items() if c}
        heap = [-k for k in vec if k in self.retired]
        heapq.heapify(heap)
        while heap:
            k = -heapq.heappop(heap)
            c = vec.pop(k, None)
            if c is None:
                continue
            for j, d in self.retired[k].items():
                value = vec.get(j, 0) + c * d
                if value:
                    if j not in vec and j in self.retired:
                        heapq.heappush(heap, -j)
                    vec[j] = value
                else:
                    vec.pop(j, None)
        return vec

    def _compress(self) -> None:
        """Path compression: every retired expression in terms of live ids."""
        for k in sorted(self.retired):
            expr = self.retired[k]
            if any(j in self.retired for j in expr):
                self.retired[k] = self._normalize(expr)

    # -- table ------------------------------------------------------------

    def _define(self, b: int, g: str) -> SparseVector:
        vec: SparseVector = {}
        for word, c in reduce_word(self.words[b] * Word.gen(g), self.policy, ONE).items():
            j = self._lookup(word)
            vec[j] = vec.get(j, 0) + c
        vec = self._normalize(vec)
        self.table[b][g] = vec
        self.definitions += 1
        return vec

    def _entry(self, b: int, g: str, define: bool) -> Optional[SparseVector]:
        row = self.table[b]
        entry = row.get(g)
        if entry is None:
            return self._define(b, g) if define else None
        if any(j in self.retired for j in entry):
            entry = self._normalize(entry)
            row[g] = entry
        return entry

    def _act_gen(self, v: SparseVector, g: str, define: bool = False) -> Optional[SparseVector]:
        out: SparseVector = {}
        for k, c in v.items():
            entry = self._entry(k, g, define)
            if entry is None:
                return None
            axpy(out, entry, c)
        return out

    def _act_word(self, v: SparseVector, word: Word) -> Optional[SparseVector]:
        for gen, exp in word.letters:
            if exp < 0:
                raise ValueError(f"relations must be positive words, got {word}")
            for _ in range(exp):
                v = self._act_gen(v, gen)
                if v is None:
                    return None
                if not v:
                    return v
        return v

    # -- coincidences -----------------------------------------------------

    def _process_pending(self) -> None:
        while self.pending:
            v = self._normalize(self.pending.popleft())
            if not v:
                continue
            m = max(v)
            lead = v.pop(m)
            expr = {k: -c / lead for k, c in v.items()}
            self.retired[m] = expr
            self.live -= 1
            self.coincidences += 1
            self.todo.pop(m, None)
            row = self.table.pop(m, {})
            for g, image in row.items():
                other = self._act_gen(expr, g, define=True)
                diff = vec_sub(self._normalize(image), other)
                if diff:
                    self.pending.append(diff)

    def _push(self, b: int, k: int) -> bool:
        """Impose relation k at basis word b; False when the table is still too sparse."""
        total: SparseVector = {}
        for coef, word in self.relations[k].terms:
            image = self._act_word({b: ONE}, word)
            if image is None:
                return False
            axpy(total, image, coef)
        if total:
            self.pending.append(total)
            self._process_pending()
        return True

    def _sweep(self) -> None:
        for b in sorted(self.todo):
            if b in self.retired or b not in self.todo:
                self.todo.pop(b, None)
                continue
            remaining = []
            for k in self.todo[b]:
                if b in self.retired:
                    break
                if not self._push(b, k):
                    remaining.append(k)
            if b in self.retired or not remaining:
                self.todo.pop(b, None)
            else:
                self.todo[b] = remaining
        self._compress()

    # -- driver -----------------------------------------------------------

    def _report_progress(self) -> None:
        message = (f"📊 {self.presentation.name}: {self.definitions} definitions, live {self.live}, "
                   f"frontier {len(self.frontier)}, coincidences {self.coincidences}")
        logger.info(message)
        if self.progress_callback:
            expected = self.presentation.expected_dimension
            progress = min(99, int(100 * self.live / expected)) if expected else 0
            self.progress_callback(message, progress)

    def run(self) -> EnumerationResult:
        started = time.time()
        memory = psutil.virtual_memory()
        logger.info(f"📥 Enumerating {self.presentation.name} at {self.spec} "
                    f"(available memory {memory.available / 1024 ** 3:.1f} GB)")
        if self.max_dim > 10000 and memory.available < 2 * 1024 ** 3:
            logger.warning("⚠️ Less than 2 GB available for a large enumeration")
        while True:
            while self.frontier:
                _, gi, b = heapq.heappop(self.frontier)
                if b in self.retired:
                    continue
                g = self.generators[gi]
                if g in self.table[b]:
                    continue
                self._define(b, g)
                if self.definitions % self.sweep_every == 0:
                    self._sweep()
                    if self.definitions % (self.sweep_every * 32) == 0:
                        self._report_progress()
                if self.checkpoint_path and self.definitions % self.checkpoint_every == 0:
                    self.save_checkpoint(self.checkpoint_path)
            self._sweep()
            if not self.frontier and not self.todo and not self.pending:
                break
        result = self._result(time.time() - started)
        logger.info(f"✅ {self.presentation.name}: dimension {result.dimension} "
                    f"({self.definitions} definitions, {self.coincidences} coincidences)")
        if self.progress_callback:
            self.progress_callback(f"Enumeration of {self.presentation.name} completed", 100)
        return result

    def _result(self, elapsed: float) -> EnumerationResult:
        live = [k for k in range(len(self.words)) if k not in self.retired]
        position = {k: i for i, k in enumerate(live)}
        matrices = {}
        for g in self.generators:
            rows = []
            for k in live:
                entry = self._normalize(self.table[k][g])
                rows.append({position[j]: c for j, c in entry.items()})
            matrices[g] = SparseMatrix(rows)
        orders = {rule.generator: [c.specialize(self.spec) for c in rule.coefficients]
                  for rule in self.presentation.order_relations}
        return EnumerationResult(
            presentation=self.presentation.name,
            generators=self.generators,
            basis=[self.words[k] for k in live],
            matrices=matrices,
            specialization=self.spec,
            max_length=self.max_length,
            timings={"enumerate": round(elapsed, 3)},
            stats={"definitions": self.definitions, "coincidences": self.coincidences,
                   "words_created": len(self.words)},
            order_relations=orders,
        )

    # -- checkpoints ------------------------------------------------------

    def save_checkpoint(self, path: Union[str, Path]) -> None:
        def vec(v: SparseVector) -> Dict[str, str]:
            return {str(k): fraction_str(c) for k, c in v.items()}

        state = {
            "version": 1,
            "presentation": self.presentation.name,
            "specialization": self.spec.as_strings(),
            "words": [str(w) for w in self.words],
            "retired": {str(k): vec(v) for k, v in self.retired.items()},
            "table": {str(k): {g: vec(v) for g, v in row.items()} for k, row in self.table.items()},
            "todo": {str(k): v for k, v in self.todo.items()},
            "frontier": [[gi, k] for _, gi, k in self.frontier],
            "pending": [vec(v) for v in self.pending],
            "counters": {"definitions": self.definitions, "coincidences": self.coincidences,
                         "live": self.live, "max_length": self.max_length},
        }
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(json.dumps(state))
        os.replace(tmp, path)
        logger.info(f"💾 Checkpoint written to {path} ({self.definitions} definitions)")

    @classmethod
    def resume(cls, path: Union[str, Path], presentation: Presentation, spec: Specialization,
               **kwargs) -> "VectorEnumerator":
        state = json.loads(Path(path).read_text())
        if state["presentation"] != presentation.name or state["specialization"] != spec.as_strings():
            raise CheckpointError(f"{path} belongs to {state['presentation']} at {state['specialization']}")

        def vec(v: Dict[str, str]) -> SparseVector:
            return {int(k): Fraction(c) for k, c in v.items()}

        self = cls(presentation, spec, **kwargs)
        self.words = [Word.parse(w) for w in state["words"]]
        self.index = {w: k for k, w in enumerate(self.words)}
        self.retired = {int(k): vec(v) for k, v in state["retired"].items()}
        self.table = {int(k): {g: vec(v) for g, v in row.items()} for k, row in state["table"].items()}
        self.todo = {int(k): list(v) for k, v in state["todo"].items()}
        self.frontier = [(self.words[k].sort_key(), gi, k) for gi, k in state["frontier"]]
        heapq.heapify(self.frontier)
        self.pending = deque(vec(v) for v in state["pending"])
        counters = state["counters"]
        self.definitions = counters["definitions"]
        self.coincidences = counters["coincidences"]
        self.live = counters["live"]
        self.max_length = counters["max_length"]
        logger.info(f"📂 Resumed {presentation.name} from {path} at {self.definitions} definitions")
        return self


def _cache_file(cache_dir: Union[str, Path], p: Presentation, spec: Specialization) -> Path:
    safe = re.sub(r"[^A-Za-z0-9_-]", "_", p.name)
    return Path(cache_dir) / f"{safe}-{spec.fingerprint()}.json"


def enumerate_algebra(p: Presentation, spec: Specialization, max_dim: int = DEFAULT_MAX_DIM,
                      max_len: int = DEFAULT_MAX_LEN, seed: Optional[int] = None,
                      progress_callback: Optional[Callable[[str, int], None]] = None,
                      checkpoint: Optional[Union[str, Path]] = None,
                      cache_dir: Optional[Union[str, Path]] = None) -> EnumerationResult:
    """
    Enumerate the regular module of ``p`` at ``spec``.

    Args:
        p: Presentation with invertible order constants
        spec: Rational point of the ring
        max_dim: Abort when the live dimension exceeds this
        max_len: Abort when a word longer than this is needed
        seed: Seed the specialization was drawn with, recorded in the result
        progress_callback: ``callback(message, progress)``
        checkpoint: Resume from / write to this JSON file
        cache_dir: Reuse and store results keyed by presentation and point

    Returns:
        EnumerationResult
    """
    cached = _cache_file(cache_dir, p, spec) if cache_dir else None
    if cached and cached.is_file():
        logger.info(f"📂 Using cached enumeration {cached}")
        result = EnumerationResult.load(cached)
        result.seed = seed
        return result
    kwargs = dict(max_dim=max_dim, max_len=max_len, progress_callback=progress_callback, checkpoint_path=checkpoint)
    if checkpoint and Path(checkpoint).is_file():
        enumerator = VectorEnumerator.resume(checkpoint, p, spec, **kwargs)
    else:
        enumerator = VectorEnumerator(p, spec, **kwargs)
    result = enumerator.run()
    result.seed = seed
    if cached:
        result.save(cached)
    return result


# -- evaluation -------------------------------------------------------------

def _apply_letter(r: EnumerationResult, gen: str, exp: int, v: SparseVector) -> SparseVector:
    m = r.matrices[gen]
    if exp > 0:
        for _ in range(exp):
            v = m.vecmul(v)
        return v
    coefficients = r.order_relations.get(gen)
    if not coefficients or not coefficients[0]:
        raise ValueError(f"{gen} has no invertible order relation")
    # g^-1 = c0^-1 (g^(n-1) - c_{n-1} g^(n-2) - ... - c_1)
    n = len(coefficients)
    inv_c0 = 1 / coefficients[0]
    for _ in range(-exp):
        powers = [v]
        for _ in range(n - 1):
            powers.append(m.vecmul(powers[-1]))
        out = {k: inv_c0 * c for k, c in powers[n - 1].items()}
        for i in range(1, n):
            if coefficients[i]:
                axpy(out, powers[i - 1], -inv_c0 * coefficients[i])
        v = out
    return v


def eval_vector(r: EnumerationResult, w: Word, v: Optional[SparseVector] = None) -> SparseVector:
    """Row vector v . M(w); v defaults to the coordinates of the identity."""
    v = dict(r.unit_vector() if v is None else v)
    for gen, exp in w.letters:
        v = _apply_letter(r, gen, exp, v)
    return v


def eval_word(r: EnumerationResult, w: Word) -> SparseMatrix:
    """M(w) as a product of generator matrices (inverses through the order relation)."""
    return SparseMatrix([eval_vector(r, w, row) for row in SparseMatrix.identity(r.dimension).rows])


def coordinates(r: EnumerationResult, x: Union[Word, AlgebraElement]) -> SparseVector:
    """Coordinates of a word or combination in the enumerated basis."""
    if isinstance(x, Word):
        return eval_vector(r, x)
    out: SparseVector = {}
    for word, coef in x.terms.items():
        if isinstance(coef, LaurentPoly):
            coef = coef.specialize(r.specialization)
        axpy(out, eval_vector(r, word), Fraction(coef))
    return out


def commutes(r: EnumerationResult, x: Word, y: Word) -> bool:
    """xy = yx in the algebra, checked on the faithful cyclic vector."""
    return eval_vector(r, x * y) == eval_vector(r, y * x)


# -- verification -----------------------------------------------------------

def _relation_residual_dense(r: EnumerationResult, relation) -> np.ndarray:
    total = None
    for coef, word in relation.terms:
        m = eval_word(r, word).dense() * coef
        total = m if total is None else total + m
    return total


def verify_result(r: EnumerationResult, p: Presentation) -> Certificate:
    """
    Re-check an enumeration from scratch.

    The matrices must satisfy every braid and order relation, the order
    constants must be nonzero (so every generator is invertible), the first
    basis word must be the identity and e_1 . M(b) = e_b for every basis word b.
    """
    name = f"verify:{r.presentation}"
    n = r.dimension
    if tuple(p.generators) != tuple(r.generators) or set(r.matrices) != set(p.generators):
        return Certificate(name=name, certified=False, error="generator mismatch")
    for g, m in r.matrices.items():
        if m.size != n or any(j >= n or j < 0 for row in m.rows for j in row):
            return Certificate(name=name, certified=False, error=f"matrix of {g} is not {n}x{n}")
    if n and r.basis[0] != Word():
        return Certificate(name=name, certified=False, error="first basis word is not the identity")

    relations = p.relations(coefficient_map(r.specialization))
    for relation in relations:
        if n < DENSE_LIMIT:
            residual = _relation_residual_dense(r, relation)
            bad = np.argwhere(residual != 0) if residual is not None else []
            if len(bad):
                i, j = (int(x) for x in bad[0])
                return Certificate(name=name, certified=False, error=f"relation {relation.name} fails",
                                   counterexample={"relation": relation.name, "row": i, "column": j,
                                                   "value": str(residual[i, j])})
            continue
        for i in range(n):
            total: SparseVector = {}
            for coef, word in relation.terms:
                axpy(total, eval_vector(r, word, {i: ONE}), coef)
            if total:
                return Certificate(name=name, certified=False, error=f"relation {relation.name} fails",
                                   counterexample={"relation": relation.name, "row": i,
                                                   "residual": {str(k): str(c) for k, c in list(total.items())[:5]}})

    constants = {rule.generator: rule.coefficients[0].specialize(r.specialization) for rule in p.order_relations}
    singular = [g for g, c in constants.items() if c == 0]
    if singular:
        return Certificate(name=name, certified=False, error=f"order constant vanishes for {singular}")

    for i, word in enumerate(r.basis):
        if eval_vector(r, word) != {i: ONE}:
            return Certificate(name=name, certified=False, error=f"basis word {word} is not e_{i}",
                               counterexample={"word": str(word), "index": i})

    logger.info(f"✅ Verified {r.presentation}: dimension {n}, {len(relations)} relations")
    return Certificate(name=name, certified=True,
                       details={"dimension": n, "relations": [rel.name for rel in relations],
                                "order_constants": {g: str(c) for g, c in constants.items()},
                                "specialization": r.specialization.as_strings(), "seed": r.seed})
