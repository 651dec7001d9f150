"""Exception hierarchy for the rule-synthesis engine.

Every failure mode that callers (library, CLI, HTTP service) need to
distinguish gets its own class so callers can branch on type rather than
parsing messages.
"""

from __future__ import annotations


class CfSynthError(Exception):
    """Base class for all engine errors."""


class MalformedInput(CfSynthError):
    """Input table could not be parsed (ragged rows, undecodable CSV, ...)."""


class EmptyTable(MalformedInput):
    """Input table has no data rows."""


class InvalidAnnotation(CfSynthError):
    """Annotation refers to rows outside the table or is inconsistent."""


class SchemaError(CfSynthError):
    """A JSON payload does not match the expected schema.

    ``path`` is a JSON-pointer-like string locating the offending element,
    e.g. ``/examples/3/row`` — used by the CLI and the HTTP service to
    produce actionable error messages.
    """

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.reason = message


class NoPredicates(CfSynthError):
    """No candidate predicate separates any cell from the rest.

    Happens for constant columns, all-empty columns, and similar degenerate
    inputs where every generated predicate matches all or none of the cells.
    """


class NoCandidates(CfSynthError):
    """Synthesis produced no rule candidate for any requested format."""


class TypeMismatch(CfSynthError):
    """A rule was applied to a column whose type it cannot evaluate against."""


class EmptyCluster(CfSynthError):
    """Internal: a cluster lost all members during assignment."""


class NoExamples(CfSynthError):
    """Clustering requires at least one formatted example row."""


class Degenerate(CfSynthError):
    """Internal: clustering input is degenerate (e.g. no unformatted rows)."""


class Unsatisfiable(CfSynthError):
    """A rule simplifies to a contradiction (matches no cell by construction)."""


class NoPositiveLeaf(CfSynthError):
    """Internal: a learned tree has no leaf predicting the target format."""


class PoolTooLarge(CfSynthError):
    """Exhaustive search refused to run: the predicate pool exceeds its cap."""
