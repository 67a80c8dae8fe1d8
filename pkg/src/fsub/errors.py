"""Exception types shared across the kernel."""

from __future__ import annotations


class KernelError(Exception):
    """Base class for every error this package raises deliberately."""


class MalformedTypeError(KernelError):
    """A type value breaks a representation invariant (e.g. an escaped bound index)."""


class PreconditionError(KernelError):
    """A checker or derivation transformer was applied outside its contract."""


class InternalCheckError(KernelError):
    """An internal consistency check failed; this indicates a bug in the kernel."""
