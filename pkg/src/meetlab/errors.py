"""Exception types raised across meetlab."""


class MeetlabError(Exception):
    """Base class for all meetlab errors."""


class ParseError(MeetlabError):
    """Malformed line in an edge-list document."""


class ValidationError(MeetlabError):
    """Input violates a graph invariant (self-loop, duplicate, disconnected...)."""


class InvalidParams(MeetlabError):
    """Bad generator or command parameters."""


class SingularSystem(MeetlabError):
    """A linear system that should be non-singular is not."""


class NoHiddenState(MeetlabError):
    """No minimal element under the EHT preorder; indicates a numerical bug."""


class NotHidden(MeetlabError):
    """A state or vertex passed as hidden is not minimal."""


class Diverged(MeetlabError):
    """Value iteration exceeded the potential bound."""


class NotConverged(MeetlabError):
    """Value iteration hit max_iters before reaching tolerance."""


class AllTimedOut(MeetlabError):
    """Every Monte Carlo trial timed out. The summary is attached."""

    def __init__(self, summary):
        super().__init__(f"all {summary.trials} trials timed out")
        self.summary = summary
