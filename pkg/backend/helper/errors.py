"""
Error vocabulary shared by the helper modules
"""


class DihedralError(ValueError):
    """Base class for every error raised by the engine"""


class NotAField(DihedralError):
    """Operation needs field coefficients"""


class NotIntegerRing(DihedralError):
    """Operation needs integer coefficients"""


class ShapeMismatch(DihedralError):
    pass


class RingMismatch(DihedralError):
    pass


class ModuleMismatch(DihedralError):
    pass


class BidegreeMismatch(DihedralError):
    pass


class InvalidIndices(DihedralError):
    """Face index tuple is not strictly increasing inside [0, n]"""


class NotADifferential(DihedralError):
    """A map expected to square to zero does not"""


class StructureInvalid(DihedralError):
    """A structural identity (t^{n+1} = 1, r^2 = 1, ...) is violated"""


class MissingReflection(DihedralError):
    pass


class MissingHuStructure(DihedralError):
    pass


class MissingTau(DihedralError):
    def __init__(self, k: int):
        super().__init__(f"tau_{k}^{k} is required but absent from the description")
        self.k = k


class MissingPartner(DihedralError):
    pass


class WindowExceeded(DihedralError):
    pass


class NonExactNode(DihedralError):
    pass


class SemanticError(DihedralError):
    pass


class ParseError(DihedralError):
    """Malformed input file; carries the offending position"""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
