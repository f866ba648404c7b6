# Copyright (c) wcanon authors.
# All rights reserved.

# This source code is licensed under the license found in the
# LICENSE file in the root directory of this source tree.

"""
Exception hierarchy shared by the library and the command-line front end.

Every error raised on purpose by wcanon derives from :class:`WcanonError`. The three
families below map one-to-one onto the CLI exit-code contract through
:func:`exit_code_for`.
"""

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_REJECTED = 2
EXIT_VERIFY_FAILED = 3
EXIT_NUMERIC_GUARD = 4


class WcanonError(Exception):
    pass


# --- superpotential validation (exit 2) -----------------------------------------


class ValidationRejection(WcanonError, ValueError):
    """
    Raised when a coefficient list does not describe an admissible superpotential.
    The class name is the rejection reason reported by ``wcanon validate``.
    """

    @property
    def reason(self) -> str:
        return type(self).__name__


class RejectEmptyCoefficients(ValidationRejection):
    pass


class RejectNegativeCoefficient(ValidationRejection):
    pass


class RejectEvenLeadingPower(ValidationRejection):
    pass


class RejectEvenLowestPower(ValidationRejection):
    pass


class RejectEvenDominance(ValidationRejection):
    pass


class RejectNonMonotone(ValidationRejection):
    pass


# --- grids, shapes and configuration (exit 1) -----------------------------------


class GridError(WcanonError, ValueError):
    pass


class BadBounds(GridError):
    pass


class TooFewNodes(GridError):
    pass


class GridMismatch(GridError):
    """
    Raised when two samples, or a sample and an operator, do not live on the same grid.
    """

    pass


class NonUniformGrid(GridError):
    pass


class DegenerateEigenvalues(GridError):
    pass


class NotNormalized(GridError):
    pass


class ConfigError(GridError):
    pass


class InvalidInput(GridError):
    """Raised for an input file whose content does not have the expected layout."""

    pass


# --- numeric guards (exit 4) ----------------------------------------------------


class NumericGuard(WcanonError, RuntimeError):
    pass


class BracketFailure(NumericGuard):
    pass


class SingularJacobian(NumericGuard):
    pass


class NonMonotone(NumericGuard):
    pass


class TruncationCap(NumericGuard):
    pass


class TruncationOverflow(NumericGuard):
    pass


class TailTooLarge(NumericGuard):
    pass


class ClippingExceeded(NumericGuard):
    pass


class CenterOutOfRange(NumericGuard):
    pass


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, ValidationRejection):
        return EXIT_REJECTED
    if isinstance(exc, NumericGuard):
        return EXIT_NUMERIC_GUARD
    return EXIT_USAGE
