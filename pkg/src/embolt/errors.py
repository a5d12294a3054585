"""Exception types shared across the package."""


class EmboltError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(EmboltError):
    """A text input (graph, embedding, dataset, checkpoint, config) is malformed.

    Carries the file path and 1-based line number when known.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}:"
            if line is not None:
                prefix += f"{line}:"
            prefix += " "
        super().__init__(prefix + message)


class InputError(EmboltError, ValueError):
    """An argument or input value is invalid."""


class EmbeddingError(InputError):
    """An embedding failed validation against its hardware graph."""


class OverlapError(EmbeddingError):
    """Two chains share a qubit."""


class DisconnectedChainError(EmbeddingError):
    """A chain does not induce a connected subgraph."""


class BrokenQubitError(EmbeddingError):
    """A chain uses a qubit that is marked broken."""


class UnknownQubitError(EmbeddingError):
    """A chain uses a qubit id outside the hardware graph."""


class ParamRangeError(InputError):
    """A model parameter lies outside its allowed range."""


class SizeLimitError(InputError):
    """A sampler was asked for more qubits than its configured cap."""
