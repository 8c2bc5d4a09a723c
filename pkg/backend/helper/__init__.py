"""
Helper modules for dihedral and reflexive homology of involutive A-infinity algebras
"""

from .exact_linalg import RingSpec, SparseMatrix, Echelon, SmithResult
from .graded import BigradedModule, SignedMap
from .chain_complex import ChainComplex, ChainMap, BarredModule
from .reports import ValidationReport
from .simplicial import FaceFamily, DInfinityModule
from .symmetry import DihedralStructure, SymmetryOperators, BarredOperators
from .ainfinity import AInfAlgebraDesc, HuStructureDesc, MultilinearMap
from .tensor_construction import TensorModuleBundle
from .complexes import ComplexSuite, MultiComplex, PSubcomplex
from .homology import HomologyResult, HomologyBasis, LESReport
from .algebra_parser import AlgebraParser

__all__ = [
    'RingSpec',
    'SparseMatrix',
    'Echelon',
    'SmithResult',
    'BigradedModule',
    'SignedMap',
    'ChainComplex',
    'ChainMap',
    'BarredModule',
    'ValidationReport',
    'FaceFamily',
    'DInfinityModule',
    'DihedralStructure',
    'SymmetryOperators',
    'BarredOperators',
    'AInfAlgebraDesc',
    'HuStructureDesc',
    'MultilinearMap',
    'TensorModuleBundle',
    'ComplexSuite',
    'MultiComplex',
    'PSubcomplex',
    'HomologyResult',
    'HomologyBasis',
    'LESReport',
    'AlgebraParser'
]
