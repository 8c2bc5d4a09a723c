"""
The dihedral tensor module of an involutive A-infinity algebra: t, r, d, faces and contracting homotopy
"""
import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, Optional, Tuple

from .ainfinity import AInfAlgebraDesc, HuStructureDesc, Tensor, TensorCalculus, Word
from .chain_complex import BarredModule
from .errors import NotADifferential
from .exact_linalg import SparseMatrix
from .graded import BigradedModule, SignedMap, map_add, map_compose, map_scale
from .reports import ValidationReport
from .simplicial import DInfinityModule, FaceFamily, totalize
from .symmetry import DihedralStructure

logger = logging.getLogger(__name__)


@dataclass
class TensorModuleBundle:
    """Tensor powers A^{(x)(n+1)} for 0 <= n <= n_max with their structure maps"""

    algebra: AInfAlgebraDesc
    module: BigradedModule
    structure: DihedralStructure
    d: SignedMap
    n_max: int
    faces: Optional[FaceFamily] = None
    _barred: Optional[BarredModule] = field(default=None, repr=False)

    @property
    def rho(self) -> int:
        return self.algebra.rho

    @property
    def ring(self):
        return self.module.ring

    @property
    def barred(self) -> BarredModule:
        if self._barred is None:
            self._barred = BarredModule(self.module)
        return self._barred


def _words_by_piece(a: AInfAlgebraDesc, n_max: int) -> Dict[Tuple[int, int], list]:
    pieces: Dict[Tuple[int, int], list] = {}
    degrees = a.degrees
    for n in range(n_max + 1):
        for word in product(a.names, repeat=n + 1):
            pieces.setdefault((n, sum(degrees[g] for g in word)), []).append(word)
    return pieces


def tensor_map(module: BigradedModule, bidegree: Tuple[int, int], image: Callable[[Word, int], Tensor],
               only_n: Optional[int] = None) -> SignedMap:
    """
    Materialize a map given on basis tensors

    Args:
        module: tensor module (source and target)
        bidegree: (dn, dm) of the map
        image: (word, internal degree) -> tensor of the target piece
        only_n: restrict to one source simplicial degree

    Returns:
        SignedMap whose columns are the images of the basis words
    """
    dn, dm = bidegree
    ring = module.ring
    blocks = {}
    for (n, m) in module.pieces:
        if only_n is not None and n != only_n:
            continue
        tn, tm = n + dn, m + dm
        rows = module.dim(tn, tm)
        if rows == 0:
            continue
        data: Dict[int, Dict[int, object]] = {}
        for col, word in enumerate(module.basis(n, m)):
            for target, c in image(word, m).items():
                data.setdefault(module.index(tn, tm, target), {})[col] = c
        blocks[(n, m)] = SparseMatrix(ring, rows, module.dim(n, m), data, trusted=True)
    return SignedMap(module, module, bidegree, blocks)


def _rotation(calc: TensorCalculus, word: Word) -> Tensor:
    last = calc.degrees[word[-1]]
    sign = -1 if (last * calc.deg(word[:-1])) % 2 else 1
    return {(word[-1],) + word[:-1]: calc.ring.one() * sign}


def _reflection(a: AInfAlgebraDesc, word: Word) -> Tensor:
    calc = a.calculus
    sign = a.rho * (-1) ** calc.koszul_pairs(word[1:])
    reordered = (word[0],) + tuple(reversed(word[1:]))
    return calc.star(a.involution, {reordered: calc.ring.one() * sign})


def build_tensor_module(a: AInfAlgebraDesc, n_max: int) -> TensorModuleBundle:
    """
    Build the tensor module with rotations, reflections and the tensor-extended differential

    Args:
        a: validated algebra description
        n_max: top simplicial degree

    Returns:
        TensorModuleBundle with structure identities and d o d = 0 asserted

    Raises:
        StructureInvalid, NotADifferential
    """
    if n_max < 0:
        raise ValueError(f"n_max must be nonnegative, got {n_max}")
    calc = a.calculus
    module = BigradedModule(a.ring, _words_by_piece(a, n_max))
    one = a.ring.one()
    t = tensor_map(module, (0, 0), lambda w, m: _rotation(calc, w))
    r = None
    if a.involution is not None:
        r = tensor_map(module, (0, 0), lambda w, m: _reflection(a, w))
    d = tensor_map(module, (0, -1), lambda w, m: calc.differential(a.d, {w: one}))
    structure = DihedralStructure(module, t, r)
    structure.check(d)
    if not map_compose(d, d).is_zero():
        raise NotADifferential("Tensor-extended differential does not square to zero")
    logger.info(f"Built tensor module up to n={n_max} with {len(module.pieces)} pieces (rho={a.rho})")
    return TensorModuleBundle(a, module, structure, d, n_max)


def _consecutive_sign(k: int, p: int) -> int:
    return -1 if (k * (p - 1)) % 2 else 1


def _wrap_sign(q: int, k: int) -> int:
    return -1 if (q * (k - 1)) % 2 else 1


def build_faces(bundle: TensorModuleBundle) -> FaceFamily:
    """
    Faces of the tensor module

    The tuple (j, ..., j+k-1) with j + k <= n applies pi_{k-1} to factors j..j+k; the wrapping tuple
    (0, ..., k-q-1, n-q+1, ..., n) is the first consecutive face after q rotations; every other tuple
    gives zero.
    """
    a = bundle.algebra
    calc = a.calculus
    module = bundle.module
    one = a.ring.one()
    faces: Dict[Tuple[int, Tuple[int, ...]], SignedMap] = {}
    for n in range(1, bundle.n_max + 1):
        t_n = bundle.structure.t_n(n)
        for k in range(1, n + 1):
            pi = a.pi_map(k - 1)
            if pi.is_zero():
                continue
            for j in range(0, n - k + 1):
                faces[(n, tuple(range(j, j + k)))] = tensor_map(
                    module, (-k, k - 1),
                    lambda w, p, j=j, k=k, pi=pi: calc.combine(
                        (_consecutive_sign(k, p), calc.insert(pi, j, {w: one}))),
                    only_n=n)
            first = faces[(n, tuple(range(k)))]
            power = SignedMap.identity(module, only_n=n)
            for q in range(1, k + 1):
                power = map_compose(t_n, power)
                indices = tuple(range(k - q)) + tuple(range(n - q + 1, n + 1))
                faces[(n, indices)] = map_scale(_wrap_sign(q, k), map_compose(first, power))
    ff = FaceFamily(module, bundle.d, faces)
    bundle.faces = ff
    logger.info(f"Built {len(ff.faces)} nonzero faces up to n={bundle.n_max}")
    return ff


def s_map_sign(k: int, n: int, p: int) -> int:
    eps = (k - 1) * p + (n - k + 1) * k + k * (k - 1) // 2 + n + 1
    return -1 if eps % 2 else 1


def build_s_maps(bundle: TensorModuleBundle, h: HuStructureDesc) -> Dict[int, SignedMap]:
    """
    Contracting homotopy pieces s^{k-1} = (-1)^e 1^{(x)(n-k+1)} (x) tau_k^k

    Returns:
        {k: s^{k-1}} with s^{k-1} of bidegree (1 - k, k), for 0 <= k <= n_max + 1

    Raises:
        MissingTau(0) when the homotopy unit is absent
    """
    a = bundle.algebra
    calc = a.calculus
    one = a.ring.one()
    h.unit()
    maps: Dict[int, SignedMap] = {}
    for k in range(0, bundle.n_max + 2):
        tau = h.diagonal(a, k)

        def image(w: Word, p: int, k=k, tau=tau) -> Tensor:
            n = len(w) - 1
            if k > n + 1 or tau.is_zero():
                return {}
            return calc.combine((s_map_sign(k, n, p), calc.insert(tau, n - k + 1, {w: one})))

        maps[k] = tensor_map(bundle.module, (1 - k, k), image)
    logger.info(f"Built contracting homotopy pieces s^-1..s^{bundle.n_max}")
    return maps


def validate_contracting(bundle: TensorModuleBundle, s_maps: Dict[int, SignedMap],
                         d1: DInfinityModule) -> ValidationReport:
    """
    Check sum over i + j = k of d1^i s^{j-1} + s^{j-1} d1^i = [k == 1] and b' s + s b' = 1

    Source degree n_max is skipped because s^{-1} leaves the truncated module there.
    """
    report = ValidationReport("contracting homotopy")
    module = bundle.module
    top = bundle.n_max
    for k in range(0, top + 2):
        total = SignedMap.zero(module, module, (1 - k, k - 1))
        for j in range(0, k + 1):
            s = s_maps.get(j)
            if s is None or s.is_zero():
                continue
            d = d1.component(k - j)
            total = map_add(total, map_add(map_compose(d, s), map_compose(s, d)))
        for n in range(0, top):
            got = total.restrict(n)
            expected = SignedMap.identity(module, only_n=n) if k == 1 else SignedMap.zero(module, module, got.bidegree)
            diff = map_add(got, map_scale(-1, expected))
            nnz = sum(b.nnz for b in diff.blocks.values())
            report.check(nnz == 0, "sum d1^i s^(j-1) + s^(j-1) d1^i", f"k={k} n={n}", difference_nnz=nnz)
    barred = bundle.barred
    bprime = totalize(d1, barred, "b'")
    s_list = [s for s in s_maps.values() if not s.is_zero()]
    for N in range(0, top):
        s_N = barred.assemble(s_list, N, 1)
        lhs = bprime.differential(N + 1).compose(s_N)
        if N >= 1:
            lhs = lhs + barred.assemble(s_list, N - 1, 1).compose(bprime.differential(N))
        diff = lhs - SparseMatrix.identity(bundle.ring, barred.dim(N))
        report.check(diff.is_zero(), "b' s + s b' = 1", f"N={N}", difference_nnz=diff.nnz)
    report.untested.append(f"source degree {top} (s^-1 leaves the truncated module)")
    logger.warning(f"Contracting identity not checked at the top degree {top}")
    report.log_summary()
    return report
