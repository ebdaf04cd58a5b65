"""Exception hierarchy shared by every engine layer."""


class HetcoError(Exception):
    """Base class for all engine errors."""


class EvalError(HetcoError):
    pass


class UnboundVariable(EvalError):
    def __init__(self, name: str, message: str | None = None):
        super().__init__(message or f"unbound variable {name!r}")
        self.name = name


class DivisionByZero(EvalError):
    def __init__(self, message: str = "division by zero"):
        super().__init__(message)


class TypeMismatch(EvalError):
    pass


def with_context(exc: EvalError, context: str) -> EvalError:
    """Same error class, message prefixed with where it happened."""
    if isinstance(exc, UnboundVariable):
        return UnboundVariable(exc.name, f"{context}: {exc}")
    return type(exc)(f"{context}: {exc}")


class ExprSyntaxError(HetcoError):
    def __init__(self, message: str, pos: int, text: str = ""):
        super().__init__(f"{message} at column {pos + 1}" + (f" in {text!r}" if text else ""))
        self.pos = pos
        self.text = text


class MissingKey(HetcoError):
    def __init__(self, key: str):
        super().__init__(f"missing key {key!r}")
        self.key = key


class KeyCollision(HetcoError):
    def __init__(self, key: str):
        super().__init__(f"rename target {key!r} already present")
        self.key = key


class NotEnabled(HetcoError):
    pass


class NegativeDelay(HetcoError):
    pass


class ConfigFault(HetcoError):
    """A runtime fault attributable to a broker binding (transform or delivery)."""

    def __init__(self, message: str, binding: int | None = None):
        super().__init__(message)
        self.binding = binding
