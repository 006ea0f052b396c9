"""Exception hierarchy shared across the engine."""


class DeskTwinError(Exception):
    """Base class for all engine errors."""


class FormatError(DeskTwinError):
    """A file does not conform to its declared layout (bad header, missing field)."""


class DataError(DeskTwinError):
    """Well-formed input carrying invalid data (non-finite values, bad ranges)."""


class NumericError(DeskTwinError):
    """A numeric routine broke down (non-finite residual, diverging loss)."""


class CatalogError(DeskTwinError):
    """Unknown asset class; carries fuzzy-match suggestions when available."""

    def __init__(self, message: str, suggestions: list[str] | None = None):
        super().__init__(message)
        self.suggestions = suggestions or []


class SceneError(DeskTwinError):
    """Invalid scene operation (unknown asset id, unknown anchor)."""


class BackendError(DeskTwinError):
    """Chat backend transport or protocol failure; carries the pipeline stage."""

    def __init__(self, message: str, stage: str | None = None):
        super().__init__(message)
        self.stage = stage


class PipelineError(DeskTwinError):
    """Prompt pipeline failure; carries the agent trace collected so far."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace
