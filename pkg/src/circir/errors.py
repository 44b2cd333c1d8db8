"""Exception hierarchy shared by every stage of the toolchain."""


class CircirError(Exception):
    """Base class for all errors raised by circir."""


class EvalError(CircirError):
    pass


class DivisionByZero(EvalError):
    pass


class TypeMismatch(EvalError):
    pass


class IndexOutOfBounds(EvalError):
    pass


class RankMismatch(EvalError):
    pass


class ShapeMismatch(EvalError):
    pass


class UnknownVariable(EvalError):
    pass


class ScriptExhausted(CircirError):
    def __init__(self, host: str):
        super().__init__(f"input script exhausted for host {host}")
        self.host = host


class DepthExceeded(CircirError):
    pass


class TransferError(CircirError):
    pass


class NoTransferRule(TransferError):
    def __init__(self, source, target):
        super().__init__(f"no transfer rule from {source} to {target}")
        self.source = source
        self.target = target


class CannotStore(TransferError):
    pass


class EquivocationError(TransferError):
    def __init__(self, var: str, hosts):
        self.var = var
        self.hosts = tuple(hosts)
        super().__init__(f"equivocation on {var}: hosts {', '.join(self.hosts)} disagree")


class CommitmentMismatch(TransferError):
    pass


class InternalError(CircirError):
    """An invariant of a compiler pass was violated."""
