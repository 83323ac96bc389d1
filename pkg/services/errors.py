# -*- coding: utf-8 -*-
"""
services/errors.py

Error hierarchy shared by services and controllers.
- Every error carries an integer code that doubles as the CLI exit status.
- str(err) renders as "[code] message".
"""

from __future__ import annotations


EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_INVARIANT = 4


class HetsegError(RuntimeError):
    code = EXIT_UNEXPECTED

    def __init__(self, message: str, code: int | None = None):
        if code is not None:
            self.code = code
        super().__init__(f"[{self.code}] {message}")
        self.message = message


class InputError(HetsegError):
    """Malformed input files, flags or selector strings."""
    code = EXIT_INPUT

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DomainError(HetsegError, ValueError):
    """Argument outside its mathematical domain."""
    code = EXIT_INPUT


class InfeasibleError(HetsegError):
    """Dimension / fold configuration that no admissible segmentation realises."""
    code = EXIT_INFEASIBLE


class GuardError(HetsegError):
    """Combinatorial guard refused (exhaustive enumeration, brute-force Lpo)."""
    code = EXIT_INFEASIBLE


class InvariantError(HetsegError):
    code = EXIT_INVARIANT


def exit_message(code: int) -> str:
    return {
        EXIT_OK:         "OK",
        EXIT_UNEXPECTED: "Unexpected error",
        EXIT_INPUT:      "Input error",
        EXIT_INFEASIBLE: "Infeasible configuration",
        EXIT_INVARIANT:  "Internal invariant violation",
    }.get(code, "Unknown error")
