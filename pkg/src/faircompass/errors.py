"""Exception types raised across the audit engine.

Every error carries a human-readable message; loaders additionally name the
offending row (1-based, header excluded) and column so auditors can fix the
source file.
"""

from __future__ import annotations


class FairCompassError(Exception):
    """Base class for all errors raised by this package."""


# -- dataset ingestion -------------------------------------------------


class IngestError(FairCompassError):
    def __init__(self, message: str, *, row: int | None = None, column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class MissingColumn(IngestError):
    pass


class RaggedRow(IngestError):
    pass


class NonBinaryLabel(IngestError):
    pass


class UnparseableNumeric(IngestError):
    pass


class UnknownFeature(FairCompassError):
    pass


class NotNumeric(FairCompassError):
    pass


class NotBinned(FairCompassError):
    """Numeric feature used in a predicate before bin edges were assigned."""


class InvalidEdges(FairCompassError):
    pass


# -- subgroups ----------------------------------------------------------


class UnknownValue(FairCompassError):
    pass


class ProductTooLarge(FairCompassError):
    pass


class StaleSubgroup(FairCompassError):
    """Subgroup belongs to a different dataset than the one supplied."""


class UnknownGroupSet(FairCompassError):
    pass


class EmptySet(FairCompassError):
    pass


class UnknownSubgroup(FairCompassError):
    pass


# -- metrics ------------------------------------------------------------


class TooFewGroups(FairCompassError):
    pass


class UndefinedRate(FairCompassError):
    pass


class OverlappingAttributes(FairCompassError):
    pass


class NoQualifyingStrata(FairCompassError):
    pass


# -- suggestions --------------------------------------------------------


class EmptyDataset(FairCompassError):
    pass


class KTooLarge(FairCompassError):
    pass


# -- decision tree schema ------------------------------------------------


class TreeSchemaError(FairCompassError):
    pass


class CycleDetected(TreeSchemaError):
    pass


class DanglingAnswer(TreeSchemaError):
    pass


class UnknownDefinition(TreeSchemaError):
    pass


class MultipleRoots(TreeSchemaError):
    pass


class UnreachableNode(TreeSchemaError):
    pass


class InvalidTreeNode(TreeSchemaError):
    pass


class UnknownNode(FairCompassError):
    pass


# -- session navigation ----------------------------------------------------


class NotAQuestion(FairCompassError):
    pass


class UnknownAnswer(FairCompassError):
    pass


class OffPath(FairCompassError):
    """Answering a node that is not the current path frontier."""


class MissingInput(FairCompassError):
    pass


class UnknownSession(FairCompassError):
    pass


class NoDefinitionSelected(FairCompassError):
    pass


# -- service ----------------------------------------------------------------


class DatasetTooLarge(FairCompassError):
    pass
