"""Exception hierarchy shared across the package.

The CLI maps exception families to exit codes: validation errors exit 1,
hypothesis violations exit 2, numerical failures exit 3, usage errors
exit 4.
"""


class CliqueWalkError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ValidationError(CliqueWalkError):
    """Structural problems in graphs, partitions, parameters or files."""

    exit_code = 1


class HypothesisError(CliqueWalkError):
    """A theory operation was asked to run outside its hypotheses."""

    exit_code = 2


class NumericalError(CliqueWalkError):
    """An algorithm failed to converge or lost all precision."""

    exit_code = 3


class UsageError(CliqueWalkError):
    """Bad command-line or configuration input."""

    exit_code = 4


# --- validation ---------------------------------------------------------

class NotAClique(ValidationError):
    pass


class EdgeUncovered(ValidationError):
    pass


class EdgeDoubleCovered(ValidationError):
    pass


class IrregularCliqueMembership(ValidationError):
    pass


class MixedCliqueOrder(ValidationError):
    pass


class NotRegular(ValidationError):
    pass


class GraphFileError(ValidationError):
    pass


class InvalidParams(ValidationError):
    pass


class NotPrime(ValidationError):
    pass


class NotOrthogonal(ValidationError):
    pass


class NotSymmetric(ValidationError):
    pass


class TooLarge(ValidationError):
    """Input exceeds a hard size cap (brute force or dense-matrix limit)."""


class OutOfRange(ValidationError):
    pass


class NegativeInput(ValidationError):
    pass


# --- hypothesis violations ----------------------------------------------

class HypothesisViolation(HypothesisError):
    pass


class BipartiteGraph(HypothesisError):
    pass


class CompleteGraph(HypothesisError):
    pass


class Disconnected(HypothesisError):
    pass


class DegreeTooSmall(HypothesisError):
    pass


class AllEigenvaluesMinusD(HypothesisError):
    pass


class EpsilonAtSimpleWalk(HypothesisError):
    """eps equals 1/d; use the plain adjacency-power path instead."""


# --- numerical -----------------------------------------------------------

class NoConvergence(NumericalError):
    pass


class Underflow(NumericalError):
    pass


class GenerationFailed(NumericalError):
    pass
