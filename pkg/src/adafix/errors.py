"""Typed exceptions raised by the toolkit.

Every failure mode surfaces as one of these; NaN/Inf never propagates
silently through public operations.
"""

from __future__ import annotations


class AdafixError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatch(AdafixError):
    """Elementwise operation on vectors of unequal dimension."""


class DivisionByZero(AdafixError):
    """Elementwise division hit a zero denominator."""


class NonFiniteError(AdafixError):
    """A value that must be finite is NaN or Inf."""


class NonFiniteEvaluation(NonFiniteError):
    """An objective returned NaN/Inf at a probe point."""


class NonFiniteIterate(NonFiniteError):
    """An optimizer step produced a NaN/Inf iterate."""


class InvalidParameter(AdafixError):
    """A constructor or hyperparameter argument is out of range."""


class InvalidSchedule(AdafixError):
    """A bound schedule yielded lower > upper at some step."""


class DegenerateInput(AdafixError):
    """An analysis operation received degenerate input (e.g. x == x*)."""


class HypothesisViolated(AdafixError):
    """A checked precondition of an analysis operation fails at the input."""


class InvalidRegion(AdafixError):
    """An annulus specification is empty or malformed."""


class InsufficientData(AdafixError):
    """A trajectory-based estimator needs more recorded points."""


class ConfigError(AdafixError):
    """An experiment configuration does not validate."""
