"""
Finite presentations of involutive A-infinity algebras with homotopy units, and their relation checks
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Any, Callable, Dict, Iterator, List, Optional, Tuple

from .errors import MissingPartner, MissingTau
from .exact_linalg import RingSpec
from .reports import ValidationReport

logger = logging.getLogger(__name__)

Word = Tuple[str, ...]
Tensor = Dict[Word, Any]
Signature = Tuple[int, Tuple[int, ...]]


@dataclass
class MultilinearMap:
    """Structure constants of a map A^{(x) arity} -> A of a fixed degree"""

    name: str
    arity: int
    degree: int
    table: Dict[Word, Dict[str, Any]] = field(default_factory=dict)

    @classmethod
    def zero(cls, name: str, arity: int, degree: int) -> "MultilinearMap":
        return cls(name, arity, degree)

    def image(self, word: Word) -> Dict[str, Any]:
        return self.table.get(word, {})

    def is_zero(self) -> bool:
        return not any(self.table.values())

    def over(self, ring: RingSpec) -> "MultilinearMap":
        """The same structure constants read in another ring; entries that vanish there are dropped"""
        table = {}
        for word, out in self.table.items():
            image = {g: ring.coerce(c) for g, c in out.items()}
            image = {g: c for g, c in image.items() if c != 0}
            if image:
                table[word] = image
        return MultilinearMap(self.name, self.arity, self.degree, table)


def tau_name(n: int, indices: Tuple[int, ...]) -> str:
    return f"tau_{n}^{','.join(str(j) for j in indices) or '()'}"


class TensorCalculus:
    """Koszul-signed evaluation of multilinear maps on tensors of generators"""

    def __init__(self, ring: RingSpec, degrees: Dict[str, int]):
        self.ring = ring
        self.degrees = dict(degrees)
        self.names = list(degrees)

    def deg(self, word: Word) -> int:
        return sum(self.degrees[g] for g in word)

    def words(self, width: int) -> Iterator[Word]:
        return product(self.names, repeat=width)

    def _add(self, acc: Tensor, word: Word, c: Any) -> None:
        s = self.ring.reduce(acc.get(word, 0) + c)
        if s == 0:
            acc.pop(word, None)
        else:
            acc[word] = s

    def combine(self, *terms: Tuple[int, Tensor]) -> Tensor:
        """Signed sum of tensors"""
        out: Tensor = {}
        for sign, x in terms:
            for word, c in x.items():
                self._add(out, word, sign * c)
        return out

    def insert(self, g: MultilinearMap, pos: int, x: Tensor) -> Tensor:
        """
        Apply 1^{(x) pos} (x) g (x) 1 ... to a tensor

        Args:
            g: map to insert
            pos: number of factors left of g
            x: tensor of any width >= pos + arity

        Returns:
            Tensor of width reduced by arity - 1, with sign (-1)^{|g| * (degree of the skipped factors)}
        """
        out: Tensor = {}
        for word, c in x.items():
            image = g.image(word[pos:pos + g.arity])
            if not image:
                continue
            sign = -1 if (g.degree * self.deg(word[:pos])) % 2 else 1
            head, tail = word[:pos], word[pos + g.arity:]
            for gen, v in image.items():
                self._add(out, head + (gen,) + tail, sign * c * v)
        return out

    def apply(self, g: MultilinearMap, x: Tensor) -> Tensor:
        return self.insert(g, 0, x)

    def differential(self, d: MultilinearMap, x: Tensor) -> Tensor:
        """Tensor extension of a degree -1 unary map"""
        out: Tensor = {}
        width = max((len(w) for w in x), default=0)
        for i in range(width):
            for word, c in self.insert(d, i, x).items():
                self._add(out, word, c)
        return out

    def star(self, involution: MultilinearMap, x: Tensor, reverse: bool = False) -> Tensor:
        """Apply a degree 0 unary map to every factor, optionally reversing the factor order first"""
        out: Tensor = {}
        for word, c in x.items():
            factors = list(reversed(word)) if reverse else list(word)
            partial: Tensor = {(): c}
            for g in factors:
                nxt: Tensor = {}
                for w, v in partial.items():
                    for h, e in involution.image((g,)).items():
                        self._add(nxt, w + (h,), v * e)
                partial = nxt
            for w, v in partial.items():
                self._add(out, w, v)
        return out

    def map_differential(self, d: MultilinearMap, f: MultilinearMap, x: Tensor) -> Tensor:
        """d(f) = d o f - (-1)^{|f|} f o d evaluated on x"""
        sign = -1 if f.degree % 2 == 0 else 1
        return self.combine((1, self.apply(d, self.apply(f, x))),
                            (sign, self.apply(f, self.differential(d, x))))

    def koszul_pairs(self, word: Word) -> int:
        return sum(self.degrees[word[i]] * self.degrees[word[j]]
                   for i in range(len(word)) for j in range(i + 1, len(word)))


def _difference(calc: TensorCalculus, lhs: Tensor, rhs: Tensor) -> int:
    return len(calc.combine((1, lhs), (-1, rhs)))


def _location(n: int, word: Word) -> str:
    return f"n={n} {'|'.join(word) or '()'}"


@dataclass
class AInfAlgebraDesc:
    """
    An involutive A-infinity algebra on a finite graded basis

    pi[n] has arity n + 2 and degree n; d has degree -1; the involution has degree 0.
    Structure maps above the declared truncation order are zero.
    """

    ring: RingSpec
    generators: List[Tuple[str, int]]
    d: MultilinearMap
    pi: Dict[int, MultilinearMap]
    involution: Optional[MultilinearMap] = None
    rho: int = 1
    truncation: int = 3

    @property
    def names(self) -> List[str]:
        return [g for g, _ in self.generators]

    @property
    def degrees(self) -> Dict[str, int]:
        return dict(self.generators)

    def degree(self, name: str) -> int:
        return self.degrees[name]

    @cached_property
    def calculus(self) -> TensorCalculus:
        return TensorCalculus(self.ring, self.degrees)

    def pi_map(self, n: int) -> MultilinearMap:
        return self.pi.get(n) or MultilinearMap.zero(f"pi_{n}", n + 2, n)

    @property
    def max_pi(self) -> int:
        """Largest n with pi_n nonzero, or -1"""
        return max((n for n, f in self.pi.items() if not f.is_zero()), default=-1)

    def with_rho(self, rho: int) -> "AInfAlgebraDesc":
        return AInfAlgebraDesc(self.ring, self.generators, self.d, self.pi, self.involution, rho, self.truncation)

    def over(self, ring: RingSpec) -> "AInfAlgebraDesc":
        if ring == self.ring:
            return self
        involution = self.involution.over(ring) if self.involution is not None else None
        return AInfAlgebraDesc(ring, self.generators, self.d.over(ring),
                               {n: f.over(ring) for n, f in self.pi.items()}, involution, self.rho,
                               self.truncation)


@dataclass
class HuStructureDesc:
    """Homotopy-unit maps tau_n^{j_q..j_1}, keyed by (n, (j_q, ..., j_1)) with j_q > ... > j_1"""

    tau: Dict[Signature, MultilinearMap] = field(default_factory=dict)

    def get(self, a: AInfAlgebraDesc, n: int, indices: Tuple[int, ...]) -> MultilinearMap:
        """The stored map, pi_{n-1} for the empty signature, or zero when absent"""
        if not indices:
            return a.pi_map(n - 1)
        q = len(indices)
        f = self.tau.get((n, tuple(indices)))
        return f or MultilinearMap.zero(tau_name(n, indices), n - q + 1, n + q - 1)

    def unit(self) -> MultilinearMap:
        f = self.tau.get((0, (0,)))
        if f is None or f.is_zero():
            raise MissingTau(0)
        return f

    def diagonal(self, a: AInfAlgebraDesc, k: int) -> MultilinearMap:
        """tau_k^k; tau_0^0 is required"""
        if k == 0:
            return self.unit()
        return self.get(a, k, (k,))

    @property
    def max_diagonal(self) -> int:
        return max((n for (n, idx), f in self.tau.items() if idx == (n,) and not f.is_zero()), default=0)

    def over(self, ring: RingSpec) -> "HuStructureDesc":
        return HuStructureDesc({sig: f.over(ring) for sig, f in self.tau.items()})


def validate_ainf(a: AInfAlgebraDesc) -> ValidationReport:
    """
    Check d^2 = 0 and the A-infinity relations d(pi_{n-1}) = sum of signed pi_{m-1}(1 .. pi_{n-m-1} .. 1)

    The relations are checked for 1 <= n <= 2P + 2 where P is the largest n with pi_n nonzero;
    beyond that both sides vanish.
    """
    report = ValidationReport("A-infinity relations")
    calc = a.calculus
    for g in a.names:
        dd = calc.apply(a.d, calc.apply(a.d, {(g,): a.ring.one()}))
        report.check(not dd, "d o d = 0", g, difference_nnz=len(dd))
    top = 2 * a.max_pi + 2
    for n in range(1, top + 1):
        for word in calc.words(n + 1):
            x = {word: a.ring.one()}
            lhs = calc.map_differential(a.d, a.pi_map(n - 1), x)
            terms = []
            for m in range(1, n):
                outer, inner = a.pi_map(m - 1), a.pi_map(n - m - 1)
                if outer.is_zero() or inner.is_zero():
                    continue
                for t in range(1, m + 2):
                    sign = (-1) ** (t * (n - m) + n + 1)
                    terms.append((sign, calc.apply(outer, calc.insert(inner, t - 1, x))))
            rhs = calc.combine(*terms)
            nnz = _difference(calc, lhs, rhs)
            report.check(nnz == 0, "d(pi) = sum pi(1..pi..1)", _location(n, word), difference_nnz=nnz)
    report.log_summary()
    return report


def validate_involution(a: AInfAlgebraDesc) -> ValidationReport:
    """Check ** = 1, d(a*) = d(a)* and pi_n(a_0..a_{n+1})* = (-1)^e pi_n(a_{n+1}*..a_0*)"""
    report = ValidationReport("involution")
    if a.involution is None:
        report.untested.append("no involution declared")
        return report
    calc = a.calculus
    inv = a.involution
    one = a.ring.one()
    for g in a.names:
        x = {(g,): one}
        twice = calc.star(inv, calc.star(inv, x))
        nnz = _difference(calc, twice, x)
        report.check(nnz == 0, "** = 1", g, difference_nnz=nnz)
        nnz = _difference(calc, calc.apply(a.d, calc.star(inv, x)), calc.star(inv, calc.apply(a.d, x)))
        report.check(nnz == 0, "d(a*) = d(a)*", g, difference_nnz=nnz)
    for n, f in sorted(a.pi.items()):
        if f.is_zero():
            continue
        for word in calc.words(n + 2):
            x = {word: one}
            lhs = calc.star(inv, calc.apply(f, x))
            eps = n * (n + 1) // 2 + calc.koszul_pairs(word)
            rhs = calc.apply(f, calc.star(inv, x, reverse=True))
            nnz = _difference(calc, lhs, calc.combine(((-1) ** eps, rhs)))
            report.check(nnz == 0, "pi(a)* = (-1)^e pi(reversed a*)", _location(n, word), difference_nnz=nnz)
    report.log_summary()
    return report


_SUPPORTED = {(0, (0,)), (1, (0,)), (1, (1,)), (2, (0,)), (2, (2, 0))}
HuRelation = Tuple[str, MultilinearMap, Callable[[Tensor], Tensor]]


def _hu_relations(a: AInfAlgebraDesc, h: HuStructureDesc, n_top: int) -> List[HuRelation]:
    """(name, tau being differentiated, right-hand side) for every checked homotopy-unit relation"""
    calc = a.calculus
    u = h.unit()
    pi = a.pi_map

    def tau(n: int, *indices: int) -> MultilinearMap:
        return h.get(a, n, indices)

    relations: List[HuRelation] = [
        ("d(tau_0^0) = 0", u, lambda x: {}),
        ("d(tau_1^0) = pi_0(tau_0^0 1) - 1", tau(1, 0),
         lambda x: calc.combine((1, calc.apply(pi(0), calc.insert(u, 0, x))), (-1, x))),
        ("d(tau_1^1) = pi_0(1 tau_0^0) - 1", tau(1, 1),
         lambda x: calc.combine((1, calc.apply(pi(0), calc.insert(u, 1, x))), (-1, x))),
        ("d(tau_2^0)", tau(2, 0),
         lambda x: calc.combine((1, calc.apply(tau(1, 0), calc.apply(pi(0), x))),
                                (1, calc.apply(pi(0), calc.insert(tau(1, 0), 0, x))),
                                (-1, calc.apply(pi(1), calc.insert(u, 0, x))))),
        ("d(tau_2^{2,0})", tau(2, 2, 0),
         lambda x: calc.combine((-1, calc.apply(tau(1, 1), calc.apply(tau(1, 0), x))),
                                (-1, calc.apply(tau(1, 0), calc.apply(tau(1, 1), x))),
                                (-1, calc.apply(tau(2, 2), calc.insert(u, 0, x))),
                                (1, calc.apply(tau(2, 0), calc.insert(u, 1, x))))),
    ]
    for n in range(2, n_top + 1):
        relations.append((f"d(tau_{n}^{n})", h.diagonal(a, n), _diagonal_rhs(a, h, n)))
    return relations


def _diagonal_rhs(a: AInfAlgebraDesc, h: HuStructureDesc, n: int) -> Callable[[Tensor], Tensor]:
    calc = a.calculus

    def rhs(x: Tensor) -> Tensor:
        terms = []
        for m in range(1, n):
            outer, inner = h.diagonal(a, m), a.pi_map(n - m - 1)
            if outer.is_zero() or inner.is_zero():
                continue
            for t in range(m):
                terms.append(((-1) ** (t * (n - m) + n), calc.apply(outer, calc.insert(inner, t, x))))
        for m in range(1, n + 1):
            outer, inner = a.pi_map(m - 1), h.diagonal(a, n - m)
            if outer.is_zero() or inner.is_zero():
                continue
            terms.append(((-1) ** (m * n + 1), calc.apply(outer, calc.insert(inner, m, x))))
        return calc.combine(*terms)

    return rhs


def validate_hu(a: AInfAlgebraDesc, h: HuStructureDesc) -> ValidationReport:
    """
    Check the differential relations of the homotopy-unit maps

    Covers d(tau_0^0), d(tau_1^0), d(tau_1^1), d(tau_2^0), d(tau_2^{2,0}) and the family d(tau_n^n)
    for 2 <= n <= K + P + 1, where K is the largest stored diagonal index and P the largest nonzero
    pi index. Other stored signatures are listed as unsupported.

    Raises:
        MissingTau(0) when the homotopy unit is absent
    """
    report = ValidationReport("homotopy-unit relations")
    calc = a.calculus
    h.unit()
    for (n, idx), f in sorted(h.tau.items()):
        if f.is_zero() or (n, idx) in _SUPPORTED or idx == (n,):
            continue
        report.unsupported.append(tau_name(n, idx))
    n_top = max(h.max_diagonal + max(a.max_pi, 0) + 1, 2)
    for relation, f, rhs in _hu_relations(a, h, n_top):
        arity = f.arity
        for word in calc.words(arity):
            x = {word: a.ring.one()}
            lhs = calc.map_differential(a.d, f, x)
            nnz = _difference(calc, lhs, rhs(x))
            report.check(nnz == 0, relation, _location(arity, word), difference_nnz=nnz)
    if report.unsupported:
        logger.warning(f"Homotopy-unit signatures without a closed relation: {report.unsupported}")
    report.log_summary()
    return report


def partner(n: int, indices: Tuple[int, ...]) -> Tuple[int, ...]:
    """Signature paired with (n, indices) under the involution"""
    return tuple(n - j for j in reversed(indices))


def validate_involutive_hu(a: AInfAlgebraDesc, h: HuStructureDesc) -> ValidationReport:
    """
    Check tau_n^J(a_0..a_{n-q})* = (-1)^e tau_n^{n-J}(a_{n-q}*..a_0*) for every stored tau with n >= 1

    Raises:
        MissingPartner when a nonzero tau has no declared partner
    """
    report = ValidationReport("involutive homotopy unit")
    if a.involution is None:
        report.untested.append("no involution declared")
        return report
    calc = a.calculus
    for (n, idx), f in sorted(h.tau.items()):
        if n < 1 or f.is_zero():
            continue
        q = len(idx)
        mate = partner(n, idx)
        if (n, mate) not in h.tau:
            raise MissingPartner(f"{tau_name(n, idx)} has no partner {tau_name(n, mate)}")
        g = h.tau[(n, mate)]
        for word in calc.words(n - q + 1):
            x = {word: a.ring.one()}
            eps = n * (n - 1) // 2 + q * (q - 1) // 2 + calc.koszul_pairs(word)
            lhs = calc.star(a.involution, calc.apply(f, x))
            rhs = calc.apply(g, calc.star(a.involution, x, reverse=True))
            nnz = _difference(calc, lhs, calc.combine(((-1) ** eps, rhs)))
            report.check(nnz == 0, "tau(a)* = (-1)^e tau'(reversed a*)", _location(n, word),
                         difference_nnz=nnz)
    report.log_summary()
    return report
