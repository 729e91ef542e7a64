"""Exception hierarchy.

Input problems raise subclasses of :class:`ValidationError` (also a
``ValueError``); optimisation trouble raises :class:`SolverError`.
"""


class ConelipError(Exception):
    pass


class ValidationError(ConelipError, ValueError):
    pass


class SolverError(ConelipError):
    pass


class TriangleViolation(ValidationError):
    def __init__(self, i, j, k, excess):
        self.i, self.j, self.k = i, j, k
        self.excess = excess
        super().__init__(
            f"triangle inequality fails: d({i},{j}) > d({i},{k}) + d({k},{j}) by {excess:.3g}"
        )


class DuplicatePoint(ValidationError):
    def __init__(self, i, j):
        self.i, self.j = i, j
        super().__init__(f"points {i} and {j} coincide")


class BadDimension(ValidationError):
    pass


class MisalignedField(ValidationError):
    pass


class BasepointMissing(ValidationError):
    pass


class NotAnExtension(ValidationError):
    pass


class DirectionNotRepresented(ValidationError):
    pass


class DegeneratePair(ValidationError):
    pass


class RaySystemMismatch(ValidationError):
    pass


class EmptySubcone(ValidationError):
    pass


class NonzeroAtBasepoint(ValidationError):
    pass


class DependentGenerators(ValidationError):
    pass


class NonUnitSupport(ValidationError):
    pass


class MatrixSpaceUnsupported(ValidationError):
    pass


class NotScalingClosed(ValidationError):
    pass


class Unbalanced(ValidationError):
    pass


class NumericalFailure(SolverError):
    pass


class NoConvergence(SolverError):
    pass


class InfeasibleProblem(SolverError):
    pass


class UnboundedProblem(SolverError):
    pass
