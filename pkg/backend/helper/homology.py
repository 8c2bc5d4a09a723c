"""
Homology over fields and over Z, homology bases with induced maps, and the long exact sequence check
"""
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple

from dotenv import find_dotenv, load_dotenv

from .ainfinity import AInfAlgebraDesc, HuStructureDesc
from .chain_complex import ChainComplex
from .complexes import ComplexSuite
from .errors import NonExactNode, NotAField, RingMismatch, StructureInvalid, WindowExceeded
from .exact_linalg import Echelon, RingSpec, SparseMatrix, kernel_basis, rank, smith_normal_form

load_dotenv(find_dotenv())

logger = logging.getLogger(__name__)


def default_workers() -> int:
    raw = os.getenv("DIHEDRAL_WORKERS", "1")
    try:
        workers = int(raw)
    except ValueError:
        raise ValueError(f"DIHEDRAL_WORKERS must be an integer, got '{raw}'")
    if workers < 1:
        raise ValueError(f"DIHEDRAL_WORKERS must be at least 1, got {workers}")
    return workers


@dataclass
class HomologyDegree:
    degree: int
    betti: int
    torsion: Tuple[int, ...] = ()
    chain_dim: int = 0
    rank_in: int = 0
    rank_out: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {"degree": self.degree, "betti": self.betti, "torsion": list(self.torsion),
                "chain_dim": self.chain_dim}


@dataclass
class HomologyResult:
    """Homology of one complex over one ring, degree by degree, inside the certified window"""

    name: str
    ring: str
    window: Tuple[int, int]
    degrees: Dict[int, HomologyDegree] = field(default_factory=dict)

    def betti(self, N: int) -> int:
        return self.degrees[N].betti

    def bettis(self) -> List[int]:
        return [self.degrees[N].betti for N in sorted(self.degrees)]

    def torsion(self, N: int) -> Tuple[int, ...]:
        return self.degrees[N].torsion

    @property
    def euler_chain(self) -> int:
        return sum((-1) ** N * d.chain_dim for N, d in self.degrees.items())

    @property
    def euler_homology(self) -> int:
        return sum((-1) ** N * d.betti for N, d in self.degrees.items())

    def euler_consistent(self) -> bool:
        """Alternating sums of chain and homology ranks agree up to the boundary ranks at the window edges"""
        if not self.degrees:
            return True
        lo, hi = min(self.degrees), max(self.degrees)
        correction = (-1) ** lo * self.degrees[lo].rank_in + (-1) ** hi * self.degrees[hi].rank_out
        return self.euler_chain - correction == self.euler_homology

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "ring": self.ring,
            "window": list(self.window),
            "degrees": [self.degrees[N].to_dict() for N in sorted(self.degrees)],
            "euler_characteristic": self.euler_chain,
            "euler_consistent": self.euler_consistent(),
        }


def _matrix_rank(m: SparseMatrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    if m.ring.is_field:
        return rank(m)
    return smith_normal_form(m).rank


def _degree_homology(task: Tuple[int, SparseMatrix, SparseMatrix]) -> HomologyDegree:
    N, d_in, d_out = task
    rank_in = _matrix_rank(d_in)
    torsion: Tuple[int, ...] = ()
    if d_out.ring.is_field or d_out.rows == 0 or d_out.cols == 0:
        rank_out = _matrix_rank(d_out)
    else:
        snf = smith_normal_form(d_out)
        rank_out, torsion = snf.rank, snf.torsion
    betti = d_in.cols - rank_in - rank_out
    return HomologyDegree(N, betti, torsion, d_in.cols, rank_in, rank_out)


def homology(c: ChainComplex, ring: Optional[RingSpec] = None, degrees: Optional[Iterable[int]] = None,
             workers: Optional[int] = None) -> HomologyResult:
    """
    Homology of a chain complex

    Args:
        c: chain complex
        ring: expected coefficient ring, checked against the complex
        degrees: degrees to compute, the whole window by default
        workers: process count; 1 computes sequentially

    Returns:
        HomologyResult with betti numbers (and invariant factors > 1 over Z)

    Raises:
        RingMismatch, WindowExceeded
    """
    if ring is not None and ring != c.ring:
        raise RingMismatch(f"Complex {c.name} is over {c.ring.label}, asked for {ring.label}")
    lo, hi = c.window
    degrees = list(range(lo, hi + 1)) if degrees is None else sorted(degrees)
    outside = [N for N in degrees if N < lo or N > hi]
    if outside:
        raise WindowExceeded(f"{c.name}: degrees {outside} are outside the certified window {lo}..{hi}")
    tasks = [(N, c.differential(N), c.differential(N + 1)) for N in degrees]
    workers = workers or default_workers()
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_degree_homology, tasks))
    else:
        results = [_degree_homology(t) for t in tasks]
    out = HomologyResult(c.name, c.ring.label, (lo, hi), {r.degree: r for r in results})
    logger.info(f"H({c.name}) over {c.ring.label}: {out.bettis()}")
    return out


class HomologyBasis:
    """Representatives of H_N over a field and the coordinates of any cycle in their terms"""

    def __init__(self, ring: RingSpec, degree: int, representatives: List[Dict[int, Any]],
                 echelon: Optional[Echelon] = None):
        self.ring = ring
        self.degree = degree
        self.representatives = representatives
        self.echelon = echelon

    @property
    def dim(self) -> int:
        return len(self.representatives)

    def classify(self, v: Dict[int, Any]) -> Dict[int, Any]:
        if self.echelon is None:
            return {}
        rem, coords = self.echelon.reduce(v)
        if rem:
            raise StructureInvalid(f"Vector in degree {self.degree} is not a cycle")
        return coords


def homology_basis(c: ChainComplex, N: int) -> HomologyBasis:
    """
    Cycles of degree N modulo boundaries, as an echelon of boundaries extended by tagged cycles

    Degrees below 0 give the zero space.
    """
    if N < 0:
        return HomologyBasis(c.ring, N, [])
    if N > c.window[1]:
        raise WindowExceeded(f"{c.name}: degree {N} is outside the certified window {c.window}")
    ring = c.ring
    ech = Echelon(ring)
    for col in c.differential(N + 1).columns():
        if col:
            ech.insert(col)
    reps = []
    for v in kernel_basis(c.differential(N)):
        if ech.insert(v, {len(reps): ring.one()}):
            reps.append(v)
    return HomologyBasis(ring, N, reps, ech)


def induced_matrix(source: HomologyBasis, target: HomologyBasis,
                   image: Callable[[Dict[int, Any]], Dict[int, Any]]) -> SparseMatrix:
    """Matrix of a map on homology, one column per source representative"""
    columns = [target.classify(image(rep)) if target.dim else {} for rep in source.representatives]
    return SparseMatrix.from_columns(source.ring, target.dim, columns)


def _suite(a: AInfAlgebraDesc, n_max: int, ring: Optional[RingSpec], rho: Optional[int] = None,
           h: Optional[HuStructureDesc] = None) -> ComplexSuite:
    if ring is not None and ring != a.ring:
        a = a.over(ring)
        h = h.over(ring) if h is not None else None
    if rho is not None:
        a = a.with_rho(rho)
    return ComplexSuite(a, n_max, h)


def cyclic_homology(a: AInfAlgebraDesc, n_max: int, ring: Optional[RingSpec] = None,
                    workers: Optional[int] = None, suite: Optional[ComplexSuite] = None) -> HomologyResult:
    """Homology of Tot of the cyclic bicomplex; the involution plays no role"""
    suite = suite or _suite(a, n_max, ring)
    return homology(suite.cyclic().total(), workers=workers)


def dihedral_homology(a: AInfAlgebraDesc, rho: int, n_max: int, ring: Optional[RingSpec] = None,
                      workers: Optional[int] = None, suite: Optional[ComplexSuite] = None) -> HomologyResult:
    """Homology of Tot of the dihedral triple complex for the given rho"""
    suite = suite or _suite(a, n_max, ring, rho)
    return homology(suite.dihedral().total(), workers=workers)


def reflexive_homology(a: AInfAlgebraDesc, rho: int, n_max: int, ring: Optional[RingSpec] = None,
                       workers: Optional[int] = None, suite: Optional[ComplexSuite] = None) -> HomologyResult:
    """Homology of Tot of the reflexive bicomplex for the given rho"""
    suite = suite or _suite(a, n_max, ring, rho)
    return homology(suite.reflexive().total(), workers=workers)


def quotient_cross_check(suite: ComplexSuite, workers: Optional[int] = None) -> Dict[str, Any]:
    """
    Compare H(L) with HC, H(M) with HD and H(N) with HR degree by degree

    The comparison only holds in characteristic 0; in positive characteristic the quotient homology
    is reported without a verdict.
    """
    if not suite.ring.is_field:
        raise NotAField("Quotient complexes need field coefficients")
    pairs = [("L", suite.cyclic)]
    if suite.barred_ops.has_reflection:
        pairs += [("M", suite.dihedral), ("N", suite.reflexive)]
    quotients = suite.quotients()
    out: Dict[str, Any] = {}
    for name, multi in pairs:
        quotient = homology(quotients[name], workers=workers)
        entry = {"quotient": quotient.to_dict(), "agrees": None}
        if suite.ring.characteristic() == 0:
            total = homology(multi().total(), workers=workers)
            entry["agrees"] = quotient.bettis() == total.bettis()
            if not entry["agrees"]:
                logger.warning(f"H({name}) {quotient.bettis()} differs from H(Tot) {total.bettis()}")
        else:
            logger.warning(f"Quotient comparison for {name} is not available in characteristic "
                           f"{suite.ring.characteristic()}")
        out[name] = entry
    return out


@dataclass
class LESNode:
    node: str
    degree: int
    dim: int
    rank_in: int
    rank_out: int
    composite_zero: bool

    @property
    def exact(self) -> bool:
        return self.composite_zero and self.rank_in + self.rank_out == self.dim

    def to_dict(self) -> Dict[str, Any]:
        return {"node": self.node, "degree": self.degree, "dim": self.dim, "rank_in": self.rank_in,
                "rank_out": self.rank_out, "exact": self.exact}


@dataclass
class LESReport:
    """Induced maps of HR -> HD -> HD(-rho)[-2] -> HR[-1] and the exactness verdict at every node"""

    rho: int
    n_max: int
    degrees: List[int]
    nodes: List[LESNode] = field(default_factory=list)
    maps: Dict[str, Dict[int, SparseMatrix]] = field(default_factory=dict)
    dims: Dict[str, Dict[int, int]] = field(default_factory=dict)
    alpha_isomorphism: bool = True
    q_acyclic: bool = True

    @property
    def exact(self) -> bool:
        return all(n.exact for n in self.nodes)

    def ranks(self, name: str) -> Dict[int, int]:
        return {N: _matrix_rank(m) for N, m in self.maps.get(name, {}).items()}

    def raise_if_not_exact(self) -> None:
        bad = [f"{n.node}@{n.degree}" for n in self.nodes if not n.exact]
        if bad or not self.alpha_isomorphism or not self.q_acyclic:
            raise NonExactNode(f"Long exact sequence fails at {bad} "
                               f"(alpha iso: {self.alpha_isomorphism}, Q acyclic: {self.q_acyclic})")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rho": self.rho,
            "n_max": self.n_max,
            "degrees": list(self.degrees),
            "exact": self.exact,
            "alpha_isomorphism": self.alpha_isomorphism,
            "q_acyclic": self.q_acyclic,
            "nodes": [n.to_dict() for n in self.nodes],
            "ranks": {name: {str(N): r for N, r in self.ranks(name).items()} for name in sorted(self.maps)},
            "dims": {name: {str(N): d for N, d in v.items()} for name, v in sorted(self.dims.items())},
        }


def _lift_index(m: SparseMatrix) -> Dict[int, int]:
    """For a coordinate map, the source column sent to each target row"""
    out = {}
    for r, row in m.row_items():
        (c,) = row.keys()
        out[r] = c
    return out


def verify_les(a: AInfAlgebraDesc, h: HuStructureDesc, rho: int, n_max: int,
               ring: Optional[RingSpec] = None, workers: Optional[int] = None,
               suite: Optional[ComplexSuite] = None) -> LESReport:
    """
    Build both short exact sequences at chain level and check the long exact sequence in homology

    Degrees 0..n_max-2 are checked; the connecting map lifts through Tot(D) two degrees up.

    Raises:
        NotAField, WindowExceeded, MissingHuStructure
    """
    ring = ring or a.ring
    if not ring.is_field:
        raise NotAField("The long exact sequence is verified over fields only")
    if n_max < 2:
        raise WindowExceeded(f"n_max={n_max} leaves no degree for the long exact sequence")
    suite = suite or _suite(a, n_max, ring, rho, h)
    ps = suite.p_subcomplex()
    top = n_max - 2
    degrees = list(range(0, top + 1))
    report = LESReport(rho, n_max, degrees)

    basis_r = {N: homology_basis(ps.total_r, N) for N in range(-1, top + 1)}
    basis_p = {N: homology_basis(ps.P, N) for N in range(-1, top + 1)}
    basis_d = {N: homology_basis(ps.total_d, N) for N in range(-1, top + 1)}
    basis_o = {N: homology_basis(ps.total_d_opposite, N) for N in range(-2, top + 1)}
    q_result = homology(ps.total_q, degrees=degrees, workers=workers) if ps.total_q is not None else None
    report.q_acyclic = q_result is not None and all(b == 0 for b in q_result.bettis())
    report.dims = {
        "HR": {N: basis_r[N].dim for N in degrees},
        "HP": {N: basis_p[N].dim for N in degrees},
        "HD": {N: basis_d[N].dim for N in degrees},
        "HD_opposite": {N: basis_o[N].dim for N in degrees},
        "HQ": {N: q_result.betti(N) for N in degrees} if q_result else {},
    }

    alpha_star, alpha_inverse = {}, {}
    for N in degrees:
        m = induced_matrix(basis_r[N], basis_p[N], lambda v, N=N: ps.alpha.apply(N, v))
        alpha_star[N] = m
        if m.rows != m.cols or _matrix_rank(m) != m.rows:
            report.alpha_isomorphism = False
        ech = Echelon(ring)
        for j, col in enumerate(m.columns()):
            ech.insert(col, {j: ring.one()})
        alpha_inverse[N] = ech

    i_star = {N: induced_matrix(basis_r[N], basis_d[N],
                                lambda v, N=N: ps.j.apply(N, ps.alpha.apply(N, v))) for N in degrees}
    p_star = {N: induced_matrix(basis_d[N], basis_o[N - 2], lambda v, N=N: ps.p.apply(N, v)) for N in degrees}

    def connecting(M: int) -> SparseMatrix:
        """HD(-rho)_M -> HR_{M+1}"""
        lift = _lift_index(ps.p.matrix(M + 2))
        into_p = _lift_index(ps.j.matrix(M + 1))
        columns = []
        for rep in basis_o[M].representatives:
            up = {lift[t]: v for t, v in rep.items()}
            down = ps.total_d.differential(M + 2).apply(up)
            if any(k not in into_p for k in down):
                raise StructureInvalid(f"Connecting map leaves P in degree {M + 1}")
            coords = basis_p[M + 1].classify({into_p[k]: v for k, v in down.items()})
            rem, pre = alpha_inverse[M + 1].reduce(coords)
            if rem:
                raise StructureInvalid(f"alpha_* is not onto in degree {M + 1}")
            columns.append(pre)
        return SparseMatrix.from_columns(ring, basis_r[M + 1].dim, columns)

    delta_star = {M: connecting(M) for M in range(0, top)}
    report.maps = {"alpha_star": alpha_star, "i_star": i_star, "p_star": p_star, "delta_star": delta_star}

    def node(name: str, degree: int, dim: int, incoming: Optional[SparseMatrix],
             outgoing: Optional[SparseMatrix]) -> LESNode:
        r_in = _matrix_rank(incoming) if incoming is not None else 0
        r_out = _matrix_rank(outgoing) if outgoing is not None else 0
        zero = True
        if incoming is not None and outgoing is not None:
            zero = outgoing.compose(incoming).is_zero()
        return LESNode(name, degree, dim, r_in, r_out, zero)

    for N in degrees:
        report.nodes.append(node("HR", N, basis_r[N].dim, delta_star.get(N - 1), i_star[N]))
        report.nodes.append(node("HD", N, basis_d[N].dim, i_star[N], p_star[N]))
        if N >= 2:
            report.nodes.append(node("HD_opposite", N - 2, basis_o[N - 2].dim, p_star[N], delta_star.get(N - 2)))
    status = "exact" if report.exact else "NOT exact"
    logger.info(f"Long exact sequence (rho={rho:+d}) over {ring.label} in degrees 0..{top}: {status}")
    return report
