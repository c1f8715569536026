"""Exception hierarchy shared by the solvers."""


class XP2Error(Exception):
    """Base class for all library errors."""


class DomainError(XP2Error, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class BracketError(XP2Error, ValueError):
    """A root-finding bracket does not enclose a sign change."""


class EvaluationError(XP2Error, ArithmeticError):
    """A function evaluation failed or an iteration did not converge."""


class AccuracyError(XP2Error, ArithmeticError):
    """Requested accuracy could not be reached."""


class StepSizeError(XP2Error, ArithmeticError):
    """ODE step size underflowed (stiffness or overflow in the solution)."""


class SolverError(XP2Error, RuntimeError):
    """A spectrum solver could not produce a consistent set of levels."""
