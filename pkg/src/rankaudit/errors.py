"""Exception types shared across the package."""

from __future__ import annotations


def _rebuild(cls, args, attrs):
    """Unpickle helper: exceptions here format their message in __init__,
    so rebuilding from `args` alone would double-format; restore state
    directly instead. Needed because worker-pool failures cross process
    boundaries."""
    err = cls.__new__(cls)
    Exception.__init__(err, *args)
    for k, v in attrs.items():
        setattr(err, k, v)
    return err


class AuditError(Exception):
    """Base class for all rankaudit errors."""


class GraphParseError(AuditError):
    """Malformed row in an edge or label file."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line

    def __reduce__(self):
        return (_rebuild, (type(self), self.args, {"line": self.line}))


class EmptyGraphError(AuditError):
    """Parsing produced a graph with no nodes."""


class NodeNotFoundError(AuditError):
    """A node id is not present in the graph."""

    def __init__(self, node: str, candidates: list[str] | None = None):
        msg = f"node {node!r} not in graph"
        if candidates:
            msg += f" (did you mean: {', '.join(candidates)}?)"
        super().__init__(msg)
        self.node = node
        self.candidates = candidates or []

    def __reduce__(self):
        attrs = {"node": self.node, "candidates": self.candidates}
        return (_rebuild, (type(self), self.args, attrs))


class ConvergenceError(AuditError):
    """Power iteration failed to reach tolerance within max_iterations."""

    def __init__(self, method: str, residual: float, iterations: int, context: str = ""):
        where = f" on {context}" if context else ""
        super().__init__(
            f"{method} did not converge{where}: residual {residual:.3e} "
            f"after {iterations} iterations"
        )
        self.method = method
        self.residual = residual
        self.iterations = iterations
        self.context = context

    def with_context(self, context: str) -> "ConvergenceError":
        return ConvergenceError(self.method, self.residual, self.iterations, context)

    def __reduce__(self):
        return (
            ConvergenceError,
            (self.method, self.residual, self.iterations, self.context),
        )


class DegenerateGraphError(AuditError):
    """The graph cannot support the requested method (e.g. HITS with no edges)."""


class InvalidScoreError(AuditError):
    """A score vector contains NaN or is otherwise unrankable."""


class CacheError(AuditError):
    """Base class for audit-cache persistence errors."""


class CacheParseError(CacheError):
    """Cache stream is truncated or not valid JSON."""


class UnsupportedVersionError(CacheError):
    """Cache format version is not supported by this build."""


class CorruptCacheError(CacheError):
    """Cache contents fail fingerprint or internal-consistency validation."""


class FingerprintMismatchError(CacheError):
    """Cache fingerprint does not match the supplied graph and config."""


class IncompleteCacheError(CacheError):
    """A delta vector required by constraint filtering is missing."""

    def __init__(self, node: str):
        super().__init__(f"no cached delta vector for candidate perturbation {node!r}")
        self.node = node

    def __reduce__(self):
        return (IncompleteCacheError, (self.node,))
