from typing import Optional

import numpy as np


class LocalizationError(Exception):
    pass


class ValidationError(LocalizationError, ValueError):
    pass


class DegenerateGeometryError(LocalizationError, ValueError):
    pass


class InvalidStateError(LocalizationError, ValueError):
    pass


class UnknownAnchorError(LocalizationError, LookupError):
    def __init__(self, anchor_id: str):
        super().__init__(f"Unknown anchor id '{anchor_id}'.")
        self.anchor_id = anchor_id

    def __str__(self) -> str:
        return self.args[0]


class NumericalFailureError(LocalizationError, ArithmeticError):
    def __init__(self, message: str, matrix: Optional[np.ndarray] = None):
        self.matrix = matrix
        self.condition_number = float(np.linalg.cond(matrix)) if matrix is not None else float("nan")
        super().__init__(f"{message} (condition number: {self.condition_number:.3e})")


class OrderingError(LocalizationError, ValueError):
    def __init__(self, message: str, timestamp: float, line: Optional[int] = None, index: Optional[int] = None):
        location = f"line {line}" if line is not None else f"record #{index}"
        super().__init__(f"{message} ({location}, t={timestamp})")
        self.timestamp = timestamp
        self.line = line
        self.index = index


class ParseError(LocalizationError, ValueError):
    def __init__(self, message: str, key_path: Optional[str] = None, line: Optional[int] = None):
        where = []
        if key_path:
            where.append(f"key '{key_path}'")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.key_path = key_path
        self.line = line


class OutputError(LocalizationError, OSError):
    def __init__(self, path: str, reason: str):
        super().__init__(f"Cannot write {path}: {reason}")
        self.path = path

    def __str__(self) -> str:
        return self.args[0]
