"""Exception hierarchy shared by all taxi-sentinel modules.

Every error carries a stable machine-readable ``code`` so the CLI can emit a
JSON error record and map the failure to a documented exit code:

* ``InputError``       -> exit 1 (bad files, bad formats, bad arguments)
* ``ComputationError`` -> exit 2 (well-formed inputs, no valid result)

Anything else escaping a command is an internal invariant violation (exit 3).
"""

from __future__ import annotations


class TaxiSentinelError(Exception):
    code = "ERROR"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code


class InputError(TaxiSentinelError):
    """Invalid input files, formats, or arguments."""

    code = "INPUT_ERROR"


class ComputationError(TaxiSentinelError):
    """Inputs were well-formed but no valid result exists."""

    code = "COMPUTATION_ERROR"


# --- rule compilation / matching ---

class MalformedFileError(InputError):
    code = "MALFORMED_FILE"


class BadPatternError(InputError):
    code = "BAD_PATTERN"

    def __init__(self, rule_id: str, message: str = ""):
        super().__init__(message or f"pattern for rule {rule_id!r} does not compile")
        self.rule_id = rule_id


class DuplicateIdError(InputError):
    code = "DUPLICATE_ID"

    def __init__(self, rule_id: str):
        super().__init__(f"duplicate rule id {rule_id!r}")
        self.rule_id = rule_id


class WrongLabelError(InputError):
    code = "WRONG_LABEL"


# --- evaluation ---

class OverlappingInputError(InputError):
    code = "OVERLAPPING_INPUT"


class LengthMismatchError(InputError):
    code = "LENGTH_MISMATCH"


# --- airport graph ---

class UnknownNodeError(InputError):
    code = "UNKNOWN_NODE"

    def __init__(self, node_id: str, message: str = ""):
        super().__init__(message or f"unknown node {node_id!r}")
        self.node_id = node_id


class DuplicateNodeError(InputError):
    code = "DUPLICATE_NODE"

    def __init__(self, node_id: str):
        super().__init__(f"duplicate node id {node_id!r}")
        self.node_id = node_id


class EmptyQueryError(InputError):
    code = "EMPTY_QUERY"


class NoPathError(ComputationError):
    code = "NO_PATH"


class UnresolvedDestinationError(ComputationError):
    code = "UNRESOLVED_DESTINATION"


# --- travel time / risk ---

class NonpositiveMomentError(InputError):
    code = "NONPOSITIVE_MOMENT"


class NonpositiveDistanceError(InputError):
    code = "NONPOSITIVE_DISTANCE"


class EmptyRouteError(InputError):
    code = "EMPTY_ROUTE"


class NonpositiveTimeError(InputError):
    code = "NONPOSITIVE_TIME"


class NegativeOffsetError(InputError):
    code = "NEGATIVE_OFFSET"


# --- monte carlo ---

class EmptyPlanError(InputError):
    code = "EMPTY_PLAN"


class SpotNotSharedError(InputError):
    code = "SPOT_NOT_SHARED"


# --- statistics ---

class TooFewSamplesError(InputError):
    code = "TOO_FEW_SAMPLES"


class NonpositiveSpeedError(InputError):
    code = "NONPOSITIVE_SPEED"


class ZeroVarianceError(ComputationError):
    code = "ZERO_VARIANCE"


class DegenerateGroupsError(ComputationError):
    code = "DEGENERATE_GROUPS"


class AllTiedError(ComputationError):
    code = "ALL_TIED"


class NonMonotoneTimeError(InputError):
    code = "NON_MONOTONE_TIME"
