"""Exception hierarchy shared by every module of the package."""


class LindForestError(Exception):
    """Base class for all package errors."""


class InvalidSystem(LindForestError, ValueError):
    """A Lindblad system, density matrix or simplex vector violates its invariants."""


class DimensionMismatch(InvalidSystem):
    pass


class NotGPM(LindForestError, ValueError):
    """An operator is not a generalized permutation matrix (or H is not diagonal)."""


class RankMismatch(LindForestError, ArithmeticError):
    """Structural rank ``n - n_B`` disagrees with the numerical rank of the rate matrix."""


class MethodDisagreement(LindForestError, ArithmeticError):
    """Tree enumeration and the determinant backend produced different tree sums."""


class NotInLeftKernel(LindForestError, ArithmeticError):
    pass


class NonUniformRelation(LindForestError, ValueError):
    pass


class SearchSpaceExceeded(LindForestError, RuntimeError):
    pass


class StabilityGuard(LindForestError, ValueError):
    """Time step too large for the fixed-step integrator."""


class NonPhysicalState(LindForestError, ArithmeticError):
    pass
