"""Tabulated curves: an x column plus one or more y series."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class CurveTable:
    columns: tuple
    rows: tuple

    def __post_init__(self):
        cols = tuple(self.columns)
        rows = tuple(tuple(r) for r in self.rows)
        if any(len(r) != len(cols) for r in rows):
            raise DomainError("every row must have one value per column")
        xs = [r[0] for r in rows]
        if any(not x1 < x2 for x1, x2 in zip(xs, xs[1:])):
            raise DomainError("x column must be strictly increasing")
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_columns(cls, x, series: dict):
        names = ("x",) + tuple(series)
        cols = [np.asarray(x, dtype=float)] + [np.asarray(v, dtype=float) for v in series.values()]
        return cls(names, tuple(zip(*(c.tolist() for c in cols))))

    def __len__(self):
        return len(self.rows)

    def column(self, name) -> np.ndarray:
        idx = self.columns.index(name)
        return np.array([r[idx] for r in self.rows], dtype=float)

    def to_csv(self, digits=10) -> str:
        """Comma-separated text; NaN cells (undefined values) are left blank."""
        def fmt(v):
            if v is None or (isinstance(v, float) and math.isnan(v)):
                return ""
            return f"{v:.{digits}g}"

        lines = [",".join(self.columns)]
        lines.extend(",".join(fmt(v) for v in r) for r in self.rows)
        return "\n".join(lines) + "\n"
