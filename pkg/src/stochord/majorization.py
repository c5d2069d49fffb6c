"""Vector preorders, ordered-vector and matrix classes, and T-transforms.

All preorders are evaluated on ascending sorted copies x_(1) <= ... <= x_(n)
with absolute tolerance 1e-12.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

TOL = 1e-12


def _pair(x, y, positive=False):
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    if positive and (np.any(x <= 0) or np.any(y <= 0)):
        raise ValueError("this preorder needs strictly positive entries")
    return np.sort(x, kind="stable"), np.sort(y, kind="stable")


def is_weak_super(x, y, tol: float = TOL) -> bool:
    """x is weakly supermajorized by y: partial sums of the smallest entries
    of x dominate those of y."""
    xs, ys = _pair(x, y)
    return bool(np.all(np.cumsum(xs) >= np.cumsum(ys) - tol))


def is_weak_sub(x, y, tol: float = TOL) -> bool:
    """x is weakly submajorized by y: partial sums of the largest entries of x
    are dominated by those of y."""
    xs, ys = _pair(x, y)
    return bool(np.all(np.cumsum(xs[::-1]) <= np.cumsum(ys[::-1]) + tol))


def is_majorized(x, y, tol: float = TOL) -> bool:
    """x is majorized by y: equal totals and x weakly supermajorized by y."""
    xs, ys = _pair(x, y)
    return bool(abs(xs.sum() - ys.sum()) <= tol and is_weak_super(xs, ys, tol))


def is_p_larger(x, y, tol: float = TOL) -> bool:
    """Partial products of the smallest entries: prod_{i<=k} x_(i) <= prod_{i<=k} y_(i).

    Compared in log space to avoid overflow.
    """
    xs, ys = _pair(x, y, positive=True)
    return bool(np.all(np.cumsum(np.log(xs)) <= np.cumsum(np.log(ys)) + tol))


def is_reciprocal(x, y, tol: float = TOL) -> bool:
    """Reciprocal majorization of x by y: sum_{i<=l} 1/x_(i) <= sum_{i<=l} 1/y_(i)."""
    xs, ys = _pair(x, y, positive=True)
    return bool(np.all(np.cumsum(1.0 / xs) <= np.cumsum(1.0 / ys) + tol))


RELATIONS = {
    "majorized": is_majorized,
    "weak_super": is_weak_super,
    "weak_sub": is_weak_sub,
    "p_larger": is_p_larger,
    "reciprocal": is_reciprocal,
}


def in_class(x, cls: str) -> bool:
    """Dplus: positive and nonincreasing. Eplus: positive and nondecreasing."""
    x = np.asarray(x, dtype=float).ravel()
    if np.any(x <= 0):
        return False
    d = np.diff(x)
    if cls == "Dplus":
        return bool(np.all(d <= 0))
    if cls == "Eplus":
        return bool(np.all(d >= 0))
    raise ValueError(f"unknown vector class {cls!r}")


@dataclass(frozen=True, eq=False)
class ParamMatrix:
    """Two parameter rows of equal length n."""

    rows: np.ndarray

    def __post_init__(self):
        m = np.array(self.rows, dtype=float)
        if m.ndim != 2 or m.shape[0] != 2 or m.shape[1] < 1:
            raise ValueError("a parameter matrix has exactly two rows of equal length")
        if not np.all(np.isfinite(m)) or np.any(m <= 0):
            raise ValueError("parameter matrix entries must be finite and positive")
        m.setflags(write=False)
        object.__setattr__(self, "rows", m)

    @classmethod
    def from_rows(cls, top, bottom) -> "ParamMatrix":
        top = np.asarray(top, dtype=float)
        bottom = np.asarray(bottom, dtype=float)
        if top.shape != bottom.shape:
            raise ValueError("rows must have equal length")
        return cls(np.vstack([top, bottom]))

    @property
    def n(self) -> int:
        return self.rows.shape[1]

    @property
    def top(self) -> np.ndarray:
        return self.rows[0]

    @property
    def bottom(self) -> np.ndarray:
        return self.rows[1]

    def allclose(self, other: "ParamMatrix", atol: float = 1e-9) -> bool:
        return self.rows.shape == other.rows.shape and bool(
            np.all(np.abs(self.rows - other.rows) <= atol))


def matrix_in_class(m: ParamMatrix, cls: str, tol: float = TOL) -> bool:
    """Mn: rows similarly ordered; Qn: rows oppositely ordered."""
    x, y = m.rows
    prod = (x[:, None] - x[None, :]) * (y[:, None] - y[None, :])
    if cls == "Mn":
        return bool(np.all(prod >= -tol))
    if cls == "Qn":
        return bool(np.all(prod <= tol))
    raise ValueError(f"unknown matrix class {cls!r}")


@dataclass(frozen=True)
class TTransform:
    """w I + (1 - w) P where P transposes columns i and j (0-based)."""

    w: float
    i: int
    j: int
    n: int

    def __post_init__(self):
        w = float(self.w)
        if not 0.0 <= w <= 1.0:
            raise ValueError(f"T-transform weight must lie in [0, 1], got {w}")
        i, j, n = int(self.i), int(self.j), int(self.n)
        if n < 2 or not (0 <= i < n and 0 <= j < n) or i == j:
            raise ValueError(f"invalid transposition ({i}, {j}) in dimension {n}")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "i", min(i, j))
        object.__setattr__(self, "j", max(i, j))
        object.__setattr__(self, "n", n)

    @property
    def structure(self) -> tuple[int, int]:
        return (self.i, self.j)

    def matrix(self) -> np.ndarray:
        perm = np.eye(self.n)
        perm[[self.i, self.j]] = perm[[self.j, self.i]]
        return self.w * np.eye(self.n) + (1 - self.w) * perm

    def apply_vector(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = x.copy()
        a, b = x[..., self.i], x[..., self.j]
        out[..., self.i] = self.w * a + (1 - self.w) * b
        out[..., self.j] = (1 - self.w) * a + self.w * b
        return out


def apply_t_transform(m: ParamMatrix, t: TTransform) -> ParamMatrix:
    if t.n != m.n:
        raise ValueError(f"transform dimension {t.n} does not match matrix width {m.n}")
    return ParamMatrix(m.rows @ t.matrix())


def chain_apply(m: ParamMatrix, ts: Iterable[TTransform]) -> ParamMatrix:
    for t in ts:
        m = apply_t_transform(m, t)
    return m


def chain_path(m: ParamMatrix, ts: Sequence[TTransform]) -> list[ParamMatrix]:
    """Every matrix along the chain, starting with ``m``."""
    path = [m]
    for t in ts:
        path.append(apply_t_transform(path[-1], t))
    return path


def solve_single_t(c: ParamMatrix, d: ParamMatrix, atol: float = 1e-9) -> Optional[TTransform]:
    """Find w in [0, 1] with d = c T_w for 2x2 matrices, or None.

    Each row gives a candidate weight through either output column; the first
    candidate that reproduces all four entries is returned.
    """
    if c.n != 2 or d.n != 2:
        raise ValueError("solve_single_t works on 2x2 matrices")
    cands = []
    for r in range(2):
        a, b = c.rows[r]
        if abs(a - b) > atol:
            # column 0: w a + (1 - w) b ; column 1: (1 - w) a + w b
            cands.append((d.rows[r, 0] - b) / (a - b))
            cands.append((d.rows[r, 1] - a) / (b - a))
    if not cands:
        cands = [1.0]
    for w in cands:
        if -atol <= w <= 1 + atol:
            t = TTransform(min(max(w, 0.0), 1.0), 0, 1, 2)
            if apply_t_transform(c, t).allclose(d, atol):
                return t
    return None


def row_means_matrix(m: ParamMatrix) -> ParamMatrix:
    if m.n != 2:
        raise ValueError("row_means_matrix works on 2x2 matrices")
    return apply_t_transform(m, TTransform(0.5, 0, 1, 2))


__all__ = [
    "ParamMatrix", "RELATIONS", "TTransform", "apply_t_transform", "chain_apply",
    "chain_path", "in_class", "is_majorized", "is_p_larger", "is_reciprocal",
    "is_weak_sub", "is_weak_super", "matrix_in_class", "row_means_matrix", "solve_single_t",
]
