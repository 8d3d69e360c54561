"""Shared exception types. The CLI maps these onto exit codes."""


class LinkforgeError(Exception):
    """Base class for all linkforge errors."""


class ParseError(LinkforgeError):
    """Malformed input. Carries a byte offset or line number when known."""

    def __init__(self, message: str, *, byte_offset: int | None = None,
                 line: int | None = None):
        position = []
        if byte_offset is not None:
            position.append(f"byte {byte_offset}")
        if line is not None:
            position.append(f"line {line}")
        if position:
            message = f"{message} ({', '.join(position)})"
        super().__init__(message)
        self.byte_offset = byte_offset
        self.line = line


class ContractError(LinkforgeError):
    """A caller violated a documented precondition or data contract."""


class TransportError(LinkforgeError):
    """Retryable failure talking to an external embedding backend."""
