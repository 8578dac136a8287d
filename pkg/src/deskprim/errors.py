"""Exception types shared across the package."""


class DeskprimError(Exception):
    """Base class for all package-specific errors."""


class BasisError(DeskprimError):
    """Invalid or degenerate basis configuration."""


class IntegrationError(DeskprimError):
    """Numerical blow-up during trajectory integration."""

    def __init__(self, message, dof=None, step=None):
        super().__init__(message)
        self.dof = dof
        self.step = step


class WorkspaceError(DeskprimError):
    """A pose violates the workspace bounds; names the violated bound."""


class SceneFormatError(DeskprimError):
    """Scene file failed to load or validate."""


class SubtaskParseError(DeskprimError):
    """Model answer did not match any subtask template."""

    def __init__(self, message, raw=""):
        super().__init__(message)
        self.raw = raw


class ObjectResolutionError(DeskprimError):
    """Object named by the model is unknown or ambiguous."""

    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = list(candidates)


class GeneratorOutputError(DeskprimError):
    """Generator response was malformed or had the wrong shape."""


class TransportError(DeskprimError):
    """Chat backend unreachable after exhausting retries."""


class RequestError(DeskprimError):
    """Chat backend rejected the request (non-retryable HTTP status)."""

    def __init__(self, message, status=None, body=""):
        super().__init__(message)
        self.status = status
        self.body = body


class FixtureMissError(DeskprimError):
    """Scripted backend has no response for the rendered prompt."""

    def __init__(self, message, prompt_hash=""):
        super().__init__(message)
        self.prompt_hash = prompt_hash
