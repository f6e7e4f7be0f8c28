"""Eigendecomposition and exact spectral data of adjacency matrices.

Two independent routes are kept side by side: a floating-point cyclic
Jacobi solver, and exact integer/rational arithmetic (characteristic
polynomial, integer roots, spectral projectors). The exact route never
looks at numerical eigenvectors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Optional, Sequence

import numpy as np

from .graph import Graph, max_degree


class NumericalError(RuntimeError):
    """A numerical routine failed to converge."""


class CertificateError(ValueError):
    """A certificate or projector set is malformed or inconsistent."""


# -- numerical route ---------------------------------------------------------

@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # descending
    vectors: np.ndarray = field(repr=False)  # columns are eigenvectors
    sweeps: int = 0


def jacobi_eigh(a: np.ndarray, tol: float = 1e-13, max_sweeps: int = 100) -> EigenDecomposition:
    """Cyclic Jacobi eigensolver for a real symmetric matrix.

    Sweeps over all (p, q) pairs in row order until the Frobenius norm of the
    off-diagonal part drops below ``tol``. Eigenpairs come back sorted by
    descending eigenvalue.
    """
    a = np.array(a, dtype=float, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if np.abs(a - a.T).max(initial=0.0) > 1e-12 * max(1.0, np.abs(a).max(initial=0.0)):
        raise ValueError("matrix is not symmetric")
    n = a.shape[0]
    v = np.eye(n)
    sweeps = 0

    def off_norm() -> float:
        off = a - np.diag(np.diag(a))
        return math.sqrt(float((off * off).sum()))

    while off_norm() >= tol:
        if sweeps >= max_sweeps:
            raise NumericalError(
                f"Jacobi did not converge after {max_sweeps} sweeps (off-norm {off_norm():.3e})"
            )
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                h = a[q, q] - a[p, p]
                if abs(h) + 100.0 * abs(apq) == abs(h):
                    t = apq / h  # tan of the rotation angle, avoiding tau**2 overflow
                else:
                    tau = h / (2.0 * apq)
                    t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq

    evals = np.diag(a).copy()
    order = np.argsort(-evals, kind="stable")
    return EigenDecomposition(evals[order], v[:, order], sweeps)


def eigendecompose(g: Graph) -> EigenDecomposition:
    return jacobi_eigh(g.adj)


# -- exact integer route -----------------------------------------------------

def _int_matrix(g: Graph) -> np.ndarray:
    return np.array([[int(x) for x in row] for row in g.adj], dtype=object)


def _identity(n: int) -> np.ndarray:
    eye = np.zeros((n, n), dtype=object)
    for i in range(n):
        eye[i, i] = 1
    return eye


def char_poly(g: Graph) -> list[int]:
    """Coefficients of ``det(xI - A)``, highest degree first, via Faddeev-LeVerrier.

    All arithmetic is on Python integers; every division by ``k`` is exact
    for an integer matrix and is checked.
    """
    a = _int_matrix(g)
    n = g.n
    eye = _identity(n)
    coeffs = [1]
    m = np.zeros((n, n), dtype=object)
    for k in range(1, n + 1):
        m = a.dot(m) + coeffs[-1] * eye
        trace = int(np.trace(a.dot(m)))
        c, rem = divmod(-trace, k)
        if rem:
            raise CertificateError(f"inexact division in Faddeev-LeVerrier at step {k}")
        coeffs.append(c)
    return coeffs


def poly_eval(coeffs: Sequence[int], x) -> int:
    return reduce(lambda acc, c: acc * x + c, coeffs, 0)


def synthetic_division(coeffs: Sequence[int], root: int) -> tuple[list[int], int]:
    """Divide by ``(x - root)``; returns (quotient, remainder)."""
    out = [coeffs[0]]
    for c in coeffs[1:]:
        out.append(c + out[-1] * root)
    return out[:-1], out[-1]


def poly_from_roots(roots: Sequence[tuple[int, int]]) -> list[int]:
    coeffs = [1]
    for lam, mult in roots:
        for _ in range(mult):
            coeffs = [a - lam * b for a, b in zip(coeffs + [0], [0] + coeffs)]
    return coeffs


def format_poly(coeffs: Sequence[int], var: str = "x") -> str:
    deg = len(coeffs) - 1
    parts = []
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        p = deg - k
        mag = abs(c)
        if p == 0:
            body = str(mag)
        else:
            body = (str(mag) if mag != 1 else "") + (var if p == 1 else f"{var}^{p}")
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    if not parts:
        return "0"
    first_sign, first = parts[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


@dataclass(frozen=True)
class IntegralCertificate:
    """Exact integer spectrum: ``roots`` as (eigenvalue, multiplicity), descending."""

    roots: tuple[tuple[int, int], ...]
    charpoly: tuple[int, ...]

    @property
    def eigenvalues(self) -> list[int]:
        return [lam for lam, _ in self.roots]

    @property
    def multiplicities(self) -> dict[int, int]:
        return dict(self.roots)

    @property
    def n(self) -> int:
        return sum(m for _, m in self.roots)

    def spectrum_string(self) -> str:
        return " ".join(f"{lam}:{m}" for lam, m in self.roots)

    def verify(self, g: Graph) -> None:
        """Raise CertificateError unless the certificate is consistent with ``g``."""
        lams = self.eigenvalues
        if len(set(lams)) != len(lams):
            raise CertificateError(f"duplicate eigenvalue in certificate {self.roots}")
        if any(m <= 0 for _, m in self.roots):
            raise CertificateError("multiplicities must be positive")
        if self.n != g.n:
            raise CertificateError(f"multiplicities sum to {self.n}, graph has {g.n} vertices")
        if sum(m * lam for lam, m in self.roots) != 0:
            raise CertificateError("eigenvalue sum is not the trace 0")
        if sum(m * lam * lam for lam, m in self.roots) != 2 * g.num_edges:
            raise CertificateError("sum of squared eigenvalues is not 2|E|")
        if tuple(poly_from_roots(self.roots)) != tuple(self.charpoly):
            raise CertificateError("roots do not expand to the characteristic polynomial")
        if tuple(char_poly(g)) != tuple(self.charpoly):
            raise CertificateError("characteristic polynomial does not belong to this graph")


def integer_root_factorization(g: Graph) -> tuple[list[tuple[int, int]], list[int]]:
    """Split off every integer root with ``|root| <= max degree``.

    Returns the extracted (root, multiplicity) pairs in descending order and
    the residual polynomial, which is ``[1]`` iff the graph is integral.
    """
    coeffs = char_poly(g)
    bound = max_degree(g)
    roots = []
    for lam in range(bound, -bound - 1, -1):
        mult = 0
        while len(coeffs) > 1:
            quotient, rem = synthetic_division(coeffs, lam)
            if rem:
                break
            coeffs = quotient
            mult += 1
        if mult:
            roots.append((lam, mult))
    return roots, coeffs


def integral_certificate(g: Graph) -> Optional[IntegralCertificate]:
    """Exact certificate if every adjacency eigenvalue is an integer, else None."""
    roots, residual = integer_root_factorization(g)
    if residual != [1]:
        return None
    return IntegralCertificate(tuple(roots), tuple(char_poly(g)))


def cluster_spectrum(eigenvalues: Sequence[float], tol: float = 1e-6) -> Optional[list[tuple[int, int]]]:
    """Group numerical eigenvalues onto nearby integers; None if any is not within ``tol``."""
    counts: dict[int, int] = {}
    for x in eigenvalues:
        k = round(float(x))
        if abs(x - k) > tol:
            return None
        counts[k] = counts.get(k, 0) + 1
    return sorted(counts.items(), reverse=True)


# -- exact projectors --------------------------------------------------------

@dataclass(frozen=True)
class RationalProjector:
    """Orthogonal projector ``E = numerator / denominator`` onto an eigenspace.

    ``numerator`` is an integer (object dtype) matrix and ``denominator`` a
    positive integer, reduced so the overall gcd is 1.
    """

    lam: int
    numerator: np.ndarray = field(repr=False)
    denominator: int
    multiplicity: int

    def entry(self, i: int, j: int) -> Fraction:
        """Entry at 1-indexed position (i, j)."""
        return Fraction(int(self.numerator[i - 1, j - 1]), self.denominator)

    @property
    def E(self) -> np.ndarray:
        d = self.denominator
        return np.array(
            [[Fraction(int(x), d) for x in row] for row in self.numerator], dtype=object
        )

    def to_float(self) -> np.ndarray:
        return self.numerator.astype(float) / self.denominator


def _scaled_product(a: np.ndarray, lams: Sequence[int]) -> np.ndarray:
    n = a.shape[0]
    eye = _identity(n)
    out = eye
    for lam in lams:
        out = out.dot(a - lam * eye)
    return out


def _reduce(num: np.ndarray, den: int) -> tuple[np.ndarray, int]:
    if den < 0:
        num, den = -num, -den
    g = reduce(math.gcd, (int(x) for x in num.flat), den)
    if g > 1:
        num = np.array([[int(x) // g for x in row] for row in num], dtype=object)
        den //= g
    return num, den


def rational_projectors(g: Graph, cert: IntegralCertificate) -> list[RationalProjector]:
    """Exact spectral projectors by Lagrange interpolation on the certified eigenvalues.

    ``E_r = prod_{s != r} (A - l_s I) / prod_{s != r} (l_r - l_s)``. The
    algebraic identities (idempotence, symmetry, eigen-equation, trace,
    mutual orthogonality, resolution of the identity and of ``A``) are all
    checked in integer arithmetic before returning.
    """
    lams = cert.eigenvalues
    if len(set(lams)) != len(lams):
        raise CertificateError(f"duplicate eigenvalue in certificate {cert.roots}")
    if cert.n != g.n:
        raise CertificateError("certificate size does not match the graph")
    a = _int_matrix(g)
    mult = cert.multiplicities
    projectors = []
    for lam in lams:
        others = [s for s in lams if s != lam]
        num = _scaled_product(a, others)
        den = math.prod(lam - s for s in others)
        num, den = _reduce(num, den)
        projectors.append(RationalProjector(lam, num, den, mult[lam]))
    check_projectors(g, projectors)
    return projectors


def check_projectors(g: Graph, projectors: Sequence[RationalProjector]) -> None:
    """Raise CertificateError if any exact projector identity fails."""
    n = g.n
    a = _int_matrix(g)
    eye = _identity(n)
    for p in projectors:
        num, d = p.numerator, p.denominator
        if not (num.dot(num) == d * num).all():
            raise CertificateError(f"E_{p.lam} is not idempotent")
        if not (num == num.T).all():
            raise CertificateError(f"E_{p.lam} is not symmetric")
        if not (a.dot(num) == p.lam * num).all():
            raise CertificateError(f"A E_{p.lam} != {p.lam} E_{p.lam}")
        if int(np.trace(num)) != p.multiplicity * d:
            raise CertificateError(f"trace of E_{p.lam} is not its multiplicity")
    for r, p in enumerate(projectors):
        for q in projectors[r + 1:]:
            if (p.numerator.dot(q.numerator) != 0).any():
                raise CertificateError(f"E_{p.lam} E_{q.lam} != 0")
    lcm = math.lcm(*(p.denominator for p in projectors))
    total = sum(p.numerator * (lcm // p.denominator) for p in projectors)
    if not (total == lcm * eye).all():
        raise CertificateError("projectors do not sum to the identity")
    weighted = sum(p.lam * p.numerator * (lcm // p.denominator) for p in projectors)
    if not (weighted == lcm * a).all():
        raise CertificateError("sum of lambda E_lambda is not the adjacency matrix")


def format_certificate(cert: IntegralCertificate) -> str:
    lines = [f"{lam} {m}" for lam, m in cert.roots]
    lines.append("charpoly " + " ".join(str(c) for c in cert.charpoly))
    return "\n".join(lines)
