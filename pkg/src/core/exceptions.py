# -*- coding: utf-8 -*-
"""
Exception hierarchy for the grid defense planner.

All planner-specific exceptions descend from ``GridDefenseError`` which
itself inherits from ``Exception``.  The hierarchy allows callers to
catch broad categories (e.g. every solver problem) or specific
conditions (e.g. a subproblem whose confirmation dispatch disagrees).
"""
from __future__ import annotations


# ---------------------------------------------------------------------------
# Base exception
# ---------------------------------------------------------------------------

class GridDefenseError(Exception):
    """Root of the planner exception hierarchy."""

    def __init__(self, message=None, code=None):
        Exception.__init__(self, message)
        self.code = code


# ---------------------------------------------------------------------------
# Case documents
# ---------------------------------------------------------------------------

class CaseError(GridDefenseError):
    """Raised when a grid case cannot be read or is not valid."""
    pass


class CaseParseError(CaseError):
    """Structural parse failure of a case document."""

    def __init__(self, message, source=None, line=None, column=None, field=None):
        location = []
        if source:
            location.append(str(source))
        if line is not None:
            location.append("line %d" % line)
        if column is not None:
            location.append("column %d" % column)
        if field:
            location.append("field %s" % field)
        if location:
            message = "%s (%s)" % (message, ", ".join(location))
        CaseError.__init__(self, message)
        self.source = source
        self.line = line
        self.column = column
        self.field = field


class CaseValidationError(CaseError):
    """Semantic validation failure.  Carries every violated invariant,
    not only the first one found."""

    def __init__(self, violations):
        self.violations = list(violations)
        CaseError.__init__(
            self,
            "%d case invariant(s) violated:\n  %s" % (
                len(self.violations), "\n  ".join(self.violations)),
        )


# ---------------------------------------------------------------------------
# Uncertainty sets
# ---------------------------------------------------------------------------

class UncertaintyError(GridDefenseError):
    """Problems with uncertainty factors or their enumeration."""
    pass


class FactorDomainError(UncertaintyError):
    """An uncertainty factor lies outside [0, 1] or an up/down pair
    sums above one."""
    pass


class DimensionMismatchError(UncertaintyError):
    """A realization does not match the dimensions of its case."""
    pass


class EnumerationLimitError(UncertaintyError):
    """Refusal to enumerate a set larger than the configured cap."""

    def __init__(self, what, count, cap):
        UncertaintyError.__init__(
            self, "%s: %d items exceed the enumeration cap of %d" % (what, count, cap))
        self.what = what
        self.count = count
        self.cap = cap


# ---------------------------------------------------------------------------
# Solver layer
# ---------------------------------------------------------------------------

class SolverError(GridDefenseError):
    """Raised when an LP/MILP backend fails."""
    pass


class BackendFailure(SolverError):
    """The backend returned a non-optimal status or crashed."""

    def __init__(self, message, status=None, detail=None):
        SolverError.__init__(self, message, code=status)
        self.status = status
        self.detail = detail


class MipGapError(SolverError):
    """The backend stopped before proving the requested MIP gap."""
    pass


class ModelLintError(SolverError):
    """A model breaks a structural rule (unknown variable, coefficient
    spread too wide, binary with non 0/1 bounds)."""
    pass


# ---------------------------------------------------------------------------
# Model construction
# ---------------------------------------------------------------------------

class ModelError(GridDefenseError):
    """A model cannot be built from the given inputs."""
    pass


class BigMError(ModelError):
    """A big-M bound is smaller than the analytic bound it must cover."""
    pass


class EmptyScenarioSetError(ModelError):
    """The master problem needs at least one scenario."""
    pass


# ---------------------------------------------------------------------------
# Consistency checks
# ---------------------------------------------------------------------------

class ConsistencyError(GridDefenseError):
    """An internal cross-check failed.  Always signals a bug or a
    numerical fault, never bad user input."""
    pass


class PostCheckError(ConsistencyError):
    """A solve result disagrees with its independent dispatch re-check."""

    def __init__(self, message, expected=None, actual=None):
        if expected is not None and actual is not None:
            message = "%s (model %.6f MW, dispatch re-check %.6f MW)" % (
                message, expected, actual)
        ConsistencyError.__init__(self, message)
        self.expected = expected
        self.actual = actual


class BoundCrossingError(ConsistencyError):
    """The C&CG lower bound exceeded the upper bound."""

    def __init__(self, lb, ub):
        ConsistencyError.__init__(
            self, "lower bound %.6f MW exceeds upper bound %.6f MW" % (lb, ub))
        self.lb = lb
        self.ub = ub


# ---------------------------------------------------------------------------
# Decomposition and verification
# ---------------------------------------------------------------------------

class CcgError(GridDefenseError):
    """Column-and-constraint generation failures."""
    pass


class DuplicateScenarioError(CcgError):
    """The subproblem regenerated a scenario already in the master."""

    def __init__(self, signature):
        CcgError.__init__(self, "duplicate scenario %s" % signature)
        self.signature = signature


class OracleError(GridDefenseError):
    """Brute-force verification failures."""
    pass


class OracleSizeError(OracleError):
    """The instance is too large for exhaustive enumeration."""

    def __init__(self, counts, caps):
        self.counts = dict(counts)
        self.caps = dict(caps)
        parts = ["%s=%d (cap %d)" % (k, self.counts[k], self.caps.get(k, 0))
                 for k in sorted(self.counts)]
        OracleError.__init__(self, "instance too large for the oracle: %s" % ", ".join(parts))


# ---------------------------------------------------------------------------
# Error-handling utilities
# ---------------------------------------------------------------------------

def wrap_backend_error(func, *args, **kwargs):
    """Call a solver-layer function, translating low-level exceptions
    into ``BackendFailure``."""
    try:
        return func(*args, **kwargs)
    except GridDefenseError:
        raise
    except (ValueError, ArithmeticError, MemoryError) as e:
        raise BackendFailure("solver backend failure in %s: %s" % (
            getattr(func, "__name__", func), e), status="error")
