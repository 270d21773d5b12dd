"""Exception hierarchy.  Every engine failure derives from ``EngineError``."""


class EngineError(Exception):
    pass


class AlgebraInputError(EngineError, ValueError):
    """Malformed algebra-spec file or constructor arguments."""


class AntisymmetryViolation(EngineError):
    def __init__(self, i, j, k, c_ij, c_ji):
        self.indices = (i, j, k)
        super().__init__(f"c^{k}_{{{i}{j}}} = {c_ij} but c^{k}_{{{j}{i}}} = {c_ji}")


class JacobiViolation(EngineError):
    def __init__(self, i, j, k, component, value):
        self.indices = (i, j, k)
        super().__init__(
            f"Jacobi fails on (e_{i}, e_{j}, e_{k}): component {component} = {value}")


class QuasitriangularViolation(EngineError):
    """CYB(r) != 0 or t not invariant."""


class NotFactorizable(EngineError):
    """The symmetric part t is degenerate, so b cannot be inverted."""


class NonPositiveDegreeInput(EngineError):
    """A Lie series letter has a term of weight zero, so the series would not terminate."""


class PoleAtZero(EngineError):
    pass


class MalformedNu(EngineError, ValueError):
    pass


class NotHamiltonian(EngineError):
    pass


class NotInvariant(EngineError):
    pass


class Inconsistent(EngineError):
    """The corrector linear system has no solution."""


class DegreeOverflow(EngineError, ValueError):
    pass


class PrecisionError(EngineError):
    """An operation needs more degrees than its inputs are valid through."""
