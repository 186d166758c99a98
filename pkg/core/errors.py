"""
Exception hierarchy shared by every module.
Library code raises these; cli.py turns them into exit codes.
"""

from __future__ import annotations

from typing import Optional


class ShadowError(Exception):
    """Base class for all errors raised by this package."""


class StructuralError(ShadowError, ValueError):
    """Input data does not describe a valid object (bad gluing, bad degree...)."""


class PreconditionError(ShadowError, ValueError):
    """Operation invoked outside its domain."""


class InvariantViolation(ShadowError, AssertionError):
    """A property that must always hold failed. Always a bug."""


class InternalConsistencyError(InvariantViolation):
    """Self-check of a constructed object failed (e.g. d1 * d2 != 0)."""


class ArithmeticOverflowError(ShadowError, OverflowError):
    def __init__(self, value: int, bound: int):
        super().__init__(
            f"entry {value} exceeds checked bound {bound}; "
            f"rerun with SNF_MODE='exact'"
        )
        self.value = value
        self.bound = bound


class EnumerationLimitError(ShadowError, RuntimeError):
    def __init__(self, cap: int, what: str = "orbit count"):
        super().__init__(f"{what} exceeded cap {cap}")
        self.cap = cap
        self.what = what


class KirbySimplificationError(PreconditionError):
    def __init__(self, step: int, reason: str):
        super().__init__(f"witness step {step}: {reason}")
        self.step = step
        self.reason = reason


class FormatError(ShadowError, ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line
