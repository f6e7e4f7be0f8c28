"""Continuous-time single-excitation dynamics ``U(t) = exp(-i A t)`` on graphs."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Optional, Sequence

import numpy as np

from .graph import Graph, GraphError, _check_vertex, is_connected, is_regular
from .spectral import (
    CertificateError,
    EigenDecomposition,
    IntegralCertificate,
    RationalProjector,
    eigendecompose,
    integral_certificate,
)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
TIE_TOL = 1e-9  # fidelities closer than this count as equal when picking a winner
DEFAULT_GRID = 20000
DEFAULT_REFINE_TOL = 1e-12
NON_PERIODIC_WINDOW = 6 * math.pi


@lru_cache(maxsize=128)
def _decomposition(g: Graph) -> EigenDecomposition:
    return eigendecompose(g)


def propagator(g: Graph, t: float, decomp: Optional[EigenDecomposition] = None) -> np.ndarray:
    if not math.isfinite(t):
        raise ValueError(f"time must be finite, got {t}")
    d = decomp or _decomposition(g)
    v = d.vectors
    return (v * np.exp(-1j * d.eigenvalues * t)) @ v.T


def fidelity(g: Graph, i: int, j: int, t: float) -> float:
    """``|U(t)[j, i]|``; the weights ``v_i * v_j`` commute, so this is exactly symmetric in i, j."""
    _check_vertex(g, i)
    _check_vertex(g, j)
    if not math.isfinite(t):
        raise ValueError(f"time must be finite, got {t}")
    d = _decomposition(g)
    w = d.vectors[i - 1] * d.vectors[j - 1]
    return float(abs(w @ np.exp(-1j * d.eigenvalues * t)))


# -- closed-form entries -----------------------------------------------------

@dataclass(frozen=True)
class TrigPolynomial:
    """``f(t) = sum_lam coeff * exp(-i lam t)`` with exact rational coefficients."""

    terms: tuple[tuple[int, Fraction], ...]

    def __post_init__(self):
        lams = [lam for lam, _ in self.terms]
        if len(set(lams)) != len(lams):
            raise ValueError("repeated frequency in trig polynomial")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for lam, c in self.terms:
            out = out + float(c) * np.exp(-1j * lam * t)
        return out if out.ndim else complex(out)

    def value_at_zero(self) -> Fraction:
        return sum((c for _, c in self.terms), Fraction(0))

    def coefficients(self) -> dict[int, Fraction]:
        return dict(self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({c})*exp(-i*{lam}*t)" for lam, c in self.terms)


def entry_polynomial(
    g: Graph,
    cert: IntegralCertificate,
    projectors: Sequence[RationalProjector],
    i: int,
    j: int,
) -> TrigPolynomial:
    """Entry ``U(t)[i, j]`` as a trig polynomial read off the exact projectors."""
    _check_vertex(g, i)
    _check_vertex(g, j)
    if [p.lam for p in projectors] != cert.eigenvalues:
        raise CertificateError("projectors do not match the certificate's eigenvalues")
    if any(p.numerator.shape != (g.n, g.n) for p in projectors):
        raise CertificateError("projector size does not match the graph")
    terms = tuple((p.lam, c) for p in projectors if (c := p.entry(i, j)) != 0)
    return TrigPolynomial(terms)


def strongly_cospectral(
    g: Graph,
    cert: IntegralCertificate,
    projectors: Sequence[RationalProjector],
    i: int,
    j: int,
) -> bool:
    """Exact test that column i of every projector is +/- column j."""
    _check_vertex(g, i)
    _check_vertex(g, j)
    for p in projectors:
        ci, cj = p.numerator[:, i - 1], p.numerator[:, j - 1]
        if not ((ci == cj).all() or (ci == -cj).all()):
            return False
    return True


# -- global maximisation -----------------------------------------------------

@dataclass(frozen=True)
class FidelityMax:
    pair: tuple[int, int]
    t_star: float
    f_star: float
    grid_size: int
    refine_tol: float
    t_max: float


class _EntryBatch:
    """Many entries ``u_m(t) = sum_k w[m, k] exp(-i lam_k t)`` evaluated together."""

    def __init__(self, lams: np.ndarray, weights: np.ndarray):
        self.lams = lams
        self.weights = weights

    def values_on_grid(self, rows: np.ndarray, ts: np.ndarray) -> np.ndarray:
        return self.weights[rows] @ np.exp(-1j * np.outer(self.lams, ts))

    def values_at(self, rows: np.ndarray, ts: np.ndarray) -> np.ndarray:
        phases = np.exp(-1j * ts[:, None] * self.lams[None, :])
        return (self.weights[rows] * phases).sum(axis=1)

    def slope_sign(self, rows: np.ndarray, ts: np.ndarray) -> np.ndarray:
        """Sign of d|u|^2/dt = 2 Re(conj(u) u')."""
        phases = np.exp(-1j * ts[:, None] * self.lams[None, :])
        w = self.weights[rows]
        u = (w * phases).sum(axis=1)
        du = (w * phases * (-1j * self.lams[None, :])).sum(axis=1)
        return np.sign((np.conj(u) * du).real)


def _golden_max(batch: _EntryBatch, rows, lo, hi, tol):
    """Vectorised golden-section search for the maximum of |u| on each [lo, hi]."""
    a, b = lo.copy(), hi.copy()
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1 = np.abs(batch.values_at(rows, x1))
    f2 = np.abs(batch.values_at(rows, x2))
    for _ in range(200):
        active = (b - a) > tol
        if not active.any():
            break
        left = active & (f1 >= f2)  # maximum lies in [a, x2]
        right = active & ~left
        b = np.where(left, x2, b)
        x2n = np.where(left, x1, x2)
        f2n = np.where(left, f1, f2)
        a = np.where(right, x1, a)
        x1n = np.where(right, x2, x1)
        f1n = np.where(right, f2, f1)
        x1n = np.where(left, b - GOLDEN * (b - a), x1n)
        x2n = np.where(right, a + GOLDEN * (b - a), x2n)
        x1, x2 = x1n, x2n
        new_x = np.where(left, x1, x2)
        new_f = np.abs(batch.values_at(rows, new_x))
        f1 = np.where(left, new_f, f1n)
        f2 = np.where(right, new_f, f2n)
    return 0.5 * (a + b)


def _slope_polish(batch: _EntryBatch, rows, lo, hi, iterations=80):
    """Bisection on the sign change of d|u|^2/dt; NaN where there is none."""
    a, b = lo.copy(), hi.copy()
    sa = batch.slope_sign(rows, a)
    sb = batch.slope_sign(rows, b)
    ok = (sa > 0) & (sb < 0)
    for _ in range(iterations):
        mid = 0.5 * (a + b)
        sm = batch.slope_sign(rows, mid)
        go_right = sm > 0
        a = np.where(go_right, mid, a)
        b = np.where(go_right, b, mid)
    return np.where(ok, 0.5 * (a + b), np.nan)


def _maximize_batch(batch: _EntryBatch, t_max: float, grid: int, refine_tol: float, top: int = 5):
    """Best (t, f) per entry over [0, t_max]: grid scan, then refine the top local maxima."""
    ts = np.linspace(0.0, t_max, grid)
    m = batch.weights.shape[0]
    best_t = np.zeros(m)
    best_f = np.full(m, -1.0)
    chunk = max(1, 2_000_000 // grid)
    for start in range(0, m, chunk):
        rows = np.arange(start, min(m, start + chunk))
        f = np.abs(batch.values_on_grid(rows, ts))
        # endpoints are candidates as they are
        for r_local, r in enumerate(rows):
            for k in (0, grid - 1):
                _offer(best_t, best_f, r, ts[k], f[r_local, k])
        interior = (f[:, 1:-1] >= f[:, :-2]) & (f[:, 1:-1] >= f[:, 2:])
        scores = np.where(interior, f[:, 1:-1], -np.inf)
        k_top = min(top, scores.shape[1])
        idx = np.argsort(-scores, axis=1, kind="stable")[:, :k_top] + 1
        cand_rows = np.repeat(rows, k_top)
        cand_k = idx.ravel()
        valid = np.isfinite(np.take_along_axis(scores, idx - 1, axis=1).ravel())
        cand_rows, cand_k = cand_rows[valid], cand_k[valid]
        if cand_rows.size == 0:
            continue
        lo, hi = ts[cand_k - 1], ts[cand_k + 1]
        t_gold = _golden_max(batch, cand_rows, lo, hi, refine_tol)
        f_gold = np.abs(batch.values_at(cand_rows, t_gold))
        t_pol = _slope_polish(batch, cand_rows, lo, hi)
        has_pol = np.isfinite(t_pol)
        f_pol = np.where(has_pol, np.abs(batch.values_at(cand_rows, np.where(has_pol, t_pol, 0.0))), -1.0)
        use_pol = has_pol & (f_pol >= f_gold - 1e-13)
        t_c = np.where(use_pol, t_pol, t_gold)
        f_c = np.where(use_pol, f_pol, f_gold)
        grid_f = f[cand_rows - start, cand_k]
        worse = f_c < grid_f  # never return less than the grid already saw
        t_c = np.where(worse, ts[cand_k], t_c)
        f_c = np.where(worse, grid_f, f_c)
        for r, t_, f_ in zip(cand_rows, t_c, f_c):
            _offer(best_t, best_f, r, t_, f_)
    return best_t, best_f


def _offer(best_t, best_f, r, t, f):
    if f > best_f[r] + TIE_TOL or (abs(f - best_f[r]) <= TIE_TOL and t < best_t[r]):
        best_t[r], best_f[r] = t, f


def _pair_batch(g: Graph, pairs: Sequence[tuple[int, int]]) -> _EntryBatch:
    d = _decomposition(g)
    v = d.vectors
    idx_i = np.array([i - 1 for i, _ in pairs])
    idx_j = np.array([j - 1 for _, j in pairs])
    return _EntryBatch(d.eigenvalues, v[idx_i] * v[idx_j])


def max_fidelity_pairs(
    g: Graph,
    pairs: Sequence[tuple[int, int]],
    t_max: float,
    grid: int = DEFAULT_GRID,
    refine_tol: float = DEFAULT_REFINE_TOL,
) -> list[FidelityMax]:
    if not t_max > 0:
        raise ValueError(f"t_max must be positive, got {t_max}")
    if grid < 2:
        raise ValueError(f"grid needs at least 2 points, got {grid}")
    for i, j in pairs:
        _check_vertex(g, i)
        _check_vertex(g, j)
    if not pairs:
        return []
    best_t, best_f = _maximize_batch(_pair_batch(g, pairs), t_max, grid, refine_tol)
    return [
        FidelityMax(tuple(p), float(t), float(f), grid, refine_tol, float(t_max))
        for p, t, f in zip(pairs, best_t, best_f)
    ]


def max_fidelity(
    g: Graph,
    i: int,
    j: int,
    t_max: float,
    grid: int = DEFAULT_GRID,
    refine_tol: float = DEFAULT_REFINE_TOL,
) -> FidelityMax:
    """Global maximum of ``|U(t)[j, i]|`` over ``[0, t_max]``.

    Samples ``grid`` equally spaced times, brackets the five largest local
    maxima and refines each by golden-section search down to ``refine_tol``;
    a final bisection on the sign of the derivative of ``|U|^2`` pins the
    arg-max to machine precision when the bracket contains a clean sign change.
    """
    return max_fidelity_pairs(g, [(i, j)], t_max, grid, refine_tol)[0]


def best_of(results: Sequence[FidelityMax]) -> FidelityMax:
    """Largest f*, ties (within TIE_TOL) to the smaller pair, then the smaller t*."""
    best = results[0]
    for r in results[1:]:
        if r.f_star > best.f_star + TIE_TOL:
            best = r
        elif abs(r.f_star - best.f_star) <= TIE_TOL and (r.pair, r.t_star) < (best.pair, best.t_star):
            best = r
    return best


# -- periodicity and PST -----------------------------------------------------

def period(g: Graph, cert: IntegralCertificate, check: bool = True) -> float:
    """``2 pi / gcd`` of all eigenvalue differences; every vertex returns at this time."""
    if cert is None:
        raise CertificateError("period is only defined here for integral graphs")
    lams = cert.eigenvalues
    step = reduce(math.gcd, (abs(a - b) for a in lams for b in lams), 0)
    t = 2 * math.pi / step if step else 2 * math.pi
    if check:
        diag = np.abs(np.diag(propagator(g, t)))
        if (diag < 1 - 1e-9).any():
            raise CertificateError(f"numerical check failed: min return fidelity {diag.min()} at t={t}")
    return t


@dataclass(frozen=True)
class PstReport:
    graph: str
    is_regular: Optional[int]
    is_integral: bool
    is_periodic: bool
    period: Optional[float]
    best: FidelityMax
    verdict: str
    pst_tol: float
    pairs: tuple[FidelityMax, ...] = field(default=(), repr=False)

    @property
    def has_pst(self) -> bool:
        return self.verdict == "PST"


def default_window(g: Graph, cert: Optional[IntegralCertificate]) -> float:
    return period(g, cert) if cert is not None else NON_PERIODIC_WINDOW


def pst_report(
    g: Graph,
    t_max: Optional[float] = None,
    pst_tol: float = 1e-6,
    grid: int = DEFAULT_GRID,
    refine_tol: float = DEFAULT_REFINE_TOL,
    cert: Optional[IntegralCertificate] = None,
) -> PstReport:
    """All-pairs search for perfect state transfer.

    Only pairs ``i < j`` are scanned since ``|U_ij| = |U_ji|``. The window
    defaults to one period for integral graphs and ``6 pi`` otherwise.
    """
    if not is_connected(g):
        raise GraphError(f"{g.name or 'graph'} is disconnected")
    if g.n < 2:
        raise GraphError("PST needs at least two vertices")
    if cert is None:
        cert = integral_certificate(g)
    k = is_regular(g)
    per = period(g, cert) if cert is not None else None
    window = t_max if t_max is not None else (per if per is not None else NON_PERIODIC_WINDOW)
    pairs = [(i, j) for i in range(1, g.n + 1) for j in range(i + 1, g.n + 1)]
    results = max_fidelity_pairs(g, pairs, window, grid, refine_tol)
    best = best_of(results)
    return PstReport(
        graph=g.name,
        is_regular=k,
        is_integral=cert is not None,
        is_periodic=k is not None and cert is not None,
        period=per,
        best=best,
        verdict="PST" if best.f_star >= 1 - pst_tol else "no-PST",
        pst_tol=pst_tol,
        pairs=tuple(results),
    )
