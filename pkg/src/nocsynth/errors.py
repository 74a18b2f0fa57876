"""Exception types raised across the synthesis pipeline.

Every error carries a short machine-readable ``code`` so CLI and tests can
dispatch on the failure kind without parsing messages.
"""


class SynthesisError(Exception):
    """Base class for all pipeline errors."""

    code = "SYNTHESIS_ERROR"

    def __init__(self, message: str):
        super().__init__(f"{self.code}: {message}")
        self.message = message


class MalformedGraphError(SynthesisError):
    code = "MALFORMED_GRAPH"


class EmptyClusterError(SynthesisError):
    code = "EMPTY_CLUSTER"


class ZeroDistanceError(SynthesisError):
    code = "ZERO_DISTANCE"


class InfeasibleBalanceError(SynthesisError):
    code = "INFEASIBLE_BALANCE"


class NoWhitespaceError(SynthesisError):
    code = "NO_WHITESPACE"


class NiInfeasibleError(SynthesisError):
    code = "NI_INFEASIBLE"


class NegativeCostError(SynthesisError):
    code = "NEGATIVE_COST"


class BadPortsError(SynthesisError):
    code = "BAD_PORTS"


class UnroutedFlowError(SynthesisError):
    code = "UNROUTED_FLOW"


class UnreachableError(SynthesisError):
    code = "UNREACHABLE"


class InputError(SynthesisError):
    """Unreadable or unparsable input file."""

    code = "INPUT_ERROR"
