"""Persistency of propagator entries, complex Hadamard snapshots, and
zero-pattern analysis of discrete unitaries supported on a graph."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Optional, Sequence, Union

import numpy as np

from .dynamics import _decomposition
from .graph import Graph, _check_vertex


# -- persistency -------------------------------------------------------------

@dataclass(frozen=True)
class PersistencyResult:
    pair: tuple[int, int]
    epsilon: float
    level: float
    interval: tuple[float, float]  # half-open [t0, t1)
    length: float
    grid: int


def entry_modulus(g: Graph, i: int, j: int, ts: np.ndarray) -> np.ndarray:
    """``|U(t)[i, j]|`` at every time in ``ts``."""
    _check_vertex(g, i)
    _check_vertex(g, j)
    d = _decomposition(g)
    w = d.vectors[i - 1] * d.vectors[j - 1]
    return np.abs(w @ np.exp(-1j * np.outer(d.eigenvalues, ts)))


def longest_band_window(values: Sequence[float], epsilon: float) -> tuple[int, int, float]:
    """Longest index window ``[lo, hi]`` whose values satisfy ``max - min < 2 epsilon``.

    Two-pointer sweep with monotone deques for the running max and min. Ties
    go to the earliest window. Returns ``(lo, hi, level)`` with ``level`` the
    midpoint of the window's range.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    x = np.asarray(values, dtype=float)
    maxq: deque[int] = deque()
    minq: deque[int] = deque()
    lo = 0
    best = (0, 0)
    for hi in range(len(x)):
        while maxq and x[maxq[-1]] <= x[hi]:
            maxq.pop()
        maxq.append(hi)
        while minq and x[minq[-1]] >= x[hi]:
            minq.pop()
        minq.append(hi)
        while x[maxq[0]] - x[minq[0]] >= 2 * epsilon and lo < hi:
            lo += 1
            if maxq[0] < lo:
                maxq.popleft()
            if minq[0] < lo:
                minq.popleft()
        if x[maxq[0]] - x[minq[0]] >= 2 * epsilon:
            continue  # epsilon == 0: even a single sample fails the strict band
        if hi - lo > best[1] - best[0]:
            best = (lo, hi)
    lo, hi = best
    window = x[lo:hi + 1]
    return lo, hi, float((window.max() + window.min()) / 2)


def persistency(g: Graph, i: int, j: int, epsilon: float, grid: int = 20001) -> PersistencyResult:
    """epsilon-persistency of ``(i, j)`` on ``grid`` samples of ``[0, 2 pi]``.

    Each sample ``t_k`` stands for the half-open cell ``[t_k, t_k + h)``, so a
    window of m samples starting at ``t_lo`` is reported as
    ``[t_lo, t_lo + m h)``, clipped at ``2 pi``. Extending the window by one
    sample on either side breaks the band.
    """
    if grid < 2:
        raise ValueError("grid needs at least 2 points")
    ts = np.linspace(0.0, 2 * math.pi, grid)
    h = ts[1] - ts[0]
    lo, hi, level = longest_band_window(entry_modulus(g, i, j, ts), epsilon)
    t0 = float(ts[lo])
    t1 = float(min(ts[hi] + h, 2 * math.pi))
    return PersistencyResult((i, j), epsilon, level, (t0, t1), t1 - t0, grid)


def persistency_summary(g: Graph, epsilon: float, grid: int = 20001) -> dict:
    """Maximum and mean persistency length over all unordered pairs, diagonal included."""
    results = [persistency(g, i, j, epsilon, grid)
               for i, j in combinations_with_replacement(range(1, g.n + 1), 2)]
    lengths = [r.length for r in results]
    best = max(results, key=lambda r: r.length)
    return {"max": best.length, "max_pair": best.pair, "mean": float(np.mean(lengths)),
            "pairs": len(results)}


# -- complex Hadamard snapshots ------------------------------------------------

def is_scaled_complex_hadamard(m: np.ndarray, tol: float = 1e-10) -> Optional[float]:
    """Scale ``c`` if all ``|m_ij|`` equal ``c`` and ``(m/c)(m/c)^H = n I``, else None."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    mod = np.abs(m)
    c = float(mod.mean())
    if c <= tol or np.abs(mod - c).max() > tol:
        return None
    h = m / c
    n = m.shape[0]
    if np.abs(h @ h.conj().T - n * np.eye(n)).max() > tol * n:
        return None
    return c


# -- discrete unitaries with graph support ------------------------------------

@dataclass(frozen=True)
class ScaledIntegerMatrix:
    """Exact matrix ``ints / sqrt(scale_sq)``; powers stay exact."""

    ints: tuple[tuple[int, ...], ...]
    scale_sq: int

    @property
    def n(self) -> int:
        return len(self.ints)

    def to_float(self) -> np.ndarray:
        return np.array(self.ints, dtype=float) / math.sqrt(self.scale_sq)

    def is_unitary(self) -> bool:
        """Exact check of ``M M^T = scale_sq I`` (real integer matrices)."""
        m = self.ints
        n = self.n
        return all(
            sum(m[r][k] * m[s][k] for k in range(n)) == (self.scale_sq if r == s else 0)
            for r in range(n) for s in range(n)
        )


def _int_matmul(a, b):
    n, p = len(a), len(b[0])
    return tuple(
        tuple(sum(a[r][k] * b[k][c] for k in range(len(b))) for c in range(p)) for r in range(n)
    )


def w_k4_exact() -> ScaledIntegerMatrix:
    """The 0/+-1 sign matrix on K4 together with its 1/sqrt(3) normalisation."""
    return ScaledIntegerMatrix(
        ((0, -1, 1, 1),
         (1, 0, -1, 1),
         (1, -1, 0, -1),
         (1, 1, 1, 0)),
        3,
    )


def w_k4() -> np.ndarray:
    return w_k4_exact().to_float()


def zero_pattern(m, zero_tol: float = 1e-9) -> np.ndarray:
    """Boolean matrix, True where the entry is structurally nonzero."""
    if isinstance(m, ScaledIntegerMatrix):
        return np.array(m.ints, dtype=object) != 0
    return np.abs(np.asarray(m)) > zero_tol


@dataclass(frozen=True)
class TransferSearch:
    hit: Optional[tuple[int, int, int]]  # (step, i, j), 1-indexed vertices
    patterns: tuple[tuple[tuple[bool, ...], ...], ...]  # in order of first appearance
    steps: int

    @property
    def num_patterns(self) -> int:
        return len(self.patterns)


def _as_key(pattern: np.ndarray) -> tuple[tuple[bool, ...], ...]:
    return tuple(tuple(bool(x) for x in row) for row in pattern)


def probability_transfer_search(
    w: Union[np.ndarray, ScaledIntegerMatrix],
    max_steps: int,
    zero_tol: float = 1e-9,
    hit_tol: float = 1e-9,
) -> TransferSearch:
    """Scan ``W^t`` for ``t = 1..max_steps``.

    Records the first off-diagonal ``(t, i, j)`` with ``|W^t[j, i]| = 1`` (to
    ``hit_tol``; exactly for a ScaledIntegerMatrix) and every distinct zero
    pattern seen along the way. The scan continues after a hit so the
    pattern set covers all ``max_steps`` powers.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be positive")
    exact = isinstance(w, ScaledIntegerMatrix)
    if exact:
        if not w.is_unitary():
            raise ValueError("matrix is not unitary")
        n = w.n
        power, scale = w.ints, w.scale_sq
    else:
        w = np.asarray(w, dtype=complex)
        n = w.shape[0]
        if np.abs(w @ w.conj().T - np.eye(n)).max() > 1e-10:
            raise ValueError("matrix is not unitary within 1e-10")
        power = w
    hit = None
    seen: dict = {}
    for step in range(1, max_steps + 1):
        if step > 1:
            if exact:
                power, scale = _int_matmul(power, w.ints), scale * w.scale_sq
            else:
                power = power @ w
        if exact:
            pattern = np.array(power, dtype=object) != 0
        else:
            pattern = np.abs(power) > zero_tol
        seen.setdefault(_as_key(pattern), step)
        if hit is None:
            for i in range(n):
                for j in range(n):
                    if i == j:
                        continue
                    if exact:
                        unit = power[j][i] ** 2 == scale
                    else:
                        unit = abs(power[j, i]) >= 1 - hit_tol
                    if unit:
                        hit = (step, i + 1, j + 1)
                        break
                if hit:
                    break
    patterns = tuple(sorted(seen, key=seen.get))
    return TransferSearch(hit, patterns, max_steps)


def format_pattern(pattern) -> str:
    return "\n".join(" ".join("*" if x else "0" for x in row) for row in pattern)
