"""Exception hierarchy shared across the package."""

from __future__ import annotations


class CKError(Exception):
    """Base class for all errors raised by ckfrac."""


class DomainError(CKError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class ConvergenceError(CKError, ArithmeticError):
    """A series, fixed-point iteration or quadrature failed to converge."""


class QuadratureError(ConvergenceError):
    """The estimated discretisation error of a quadrature is too large."""


class MissingDerivativeError(CKError, ValueError):
    pass


class SolverError(CKError, ArithmeticError):
    """A Cauchy-problem solver could not produce a finite solution."""
