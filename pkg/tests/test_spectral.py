import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pstlab import catalog
from pstlab.graph import complete, complete_bipartite, cycle, from_edge_list, path
from pstlab.spectral import (
    CertificateError,
    IntegralCertificate,
    RationalProjector,
    char_poly,
    check_projectors,
    cluster_spectrum,
    eigendecompose,
    format_certificate,
    format_poly,
    integer_root_factorization,
    integral_certificate,
    jacobi_eigh,
    poly_eval,
    poly_from_roots,
    rational_projectors,
    synthetic_division,
)

INTEGRAL_KEYS = catalog.CUBIC_KEYS


def naive_poly_mul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for a, x in enumerate(p):
        for b, y in enumerate(q):
            out[a + b] += x * y
    return out


def expand_roots(roots):
    """Independent brute-force expansion of prod (x - lam)^m."""
    poly = [1]
    for lam, m in roots:
        for _ in range(m):
            poly = naive_poly_mul(poly, [1, -lam])
    return poly


# -- Jacobi ---------------------------------------------------------------------

@pytest.mark.parametrize("key", catalog.CATALOG_KEYS)
def test_jacobi_matches_lapack(key):
    g = catalog.entry(key).graph
    d = eigendecompose(g)
    a = g.adj.astype(float)
    ref = np.sort(np.linalg.eigvalsh(a))[::-1]
    assert np.allclose(d.eigenvalues, ref, atol=1e-10)
    assert np.abs(a @ d.vectors - d.vectors * d.eigenvalues).max() <= 1e-10
    assert np.abs(d.vectors.T @ d.vectors - np.eye(g.n)).max() <= 1e-12
    assert list(d.eigenvalues) == sorted(d.eigenvalues, reverse=True)


def test_k4_eigenvalues():
    assert np.allclose(eigendecompose(complete(4)).eigenvalues, [3, -1, -1, -1], atol=1e-12)


def test_empty_graph_eigensystem():
    d = eigendecompose(from_edge_list(4, []))
    assert (d.eigenvalues == 0).all()
    assert np.allclose(np.abs(d.vectors), np.eye(4))


def test_w_eigenvalues():
    d = eigendecompose(catalog.entry("w8").graph)
    r = 2 * math.sqrt(3)
    assert np.allclose(d.eigenvalues, [r] + [0] * 6 + [-r], atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12).flatmap(
    lambda n: st.lists(st.floats(-5, 5, allow_nan=False), min_size=n * n, max_size=n * n)
    .map(lambda xs: np.array(xs).reshape(n, n))))
def test_jacobi_random_symmetric(m):
    a = (m + m.T) / 2
    d = jacobi_eigh(a)
    assert np.allclose(d.eigenvalues, np.sort(np.linalg.eigvalsh(a))[::-1], atol=1e-9)
    assert np.abs(a @ d.vectors - d.vectors * d.eigenvalues).max() <= 1e-9
    assert np.abs(d.vectors.T @ d.vectors - np.eye(len(a))).max() <= 1e-12


def test_jacobi_rejects_nonsymmetric():
    with pytest.raises(ValueError):
        jacobi_eigh(np.array([[0.0, 1.0], [0.0, 0.0]]))


# -- characteristic polynomial -----------------------------------------------------

def test_charpoly_k2():
    assert char_poly(path(2)) == [1, 0, -1]


def test_charpoly_c3_hand_expansion():
    # (x - 2)(x + 1)^2 = x^3 - 3x - 2
    assert char_poly(cycle(3)) == [1, 0, -3, -2]


def test_charpoly_petersen():
    assert char_poly(catalog.entry("petersen").graph) == expand_roots([(3, 1), (1, 5), (-2, 4)])


@pytest.mark.parametrize("key", catalog.CATALOG_KEYS)
def test_charpoly_shape(key):
    g = catalog.entry(key).graph
    cp = char_poly(g)
    assert cp[0] == 1 and cp[1] == 0 and cp[2] == -g.num_edges
    assert all(isinstance(c, int) for c in cp)
    # numpy's float charpoly as an independent oracle for small coefficients
    ref = np.poly(g.adj.astype(float))
    assert np.allclose(cp, ref, rtol=1e-6, atol=1e-3 * max(1, abs(ref).max() * 1e-9))


def test_charpoly_no_overflow_tutte_coxeter():
    cp = char_poly(catalog.entry("tutte-coxeter").graph)
    assert cp == expand_roots([(3, 1), (2, 9), (0, 10), (-2, 9), (-3, 1)])


def test_poly_helpers():
    assert poly_eval([1, 0, -12], 2) == -8
    assert synthetic_division([1, 0, -3, -2], -1) == ([1, -1, -2], 0)
    assert poly_from_roots([(2, 1), (-1, 2)]) == [1, 0, -3, -2]
    assert format_poly([1, 0, -12]) == "x^2 - 12"
    assert format_poly([1, -1]) == "x - 1"
    assert format_poly([1]) == "1"


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(-6, 6), st.integers(1, 3)), max_size=5, unique_by=lambda p: p[0]))
def test_poly_from_roots_matches_naive(roots):
    assert poly_from_roots(roots) == expand_roots(roots)


# -- certificates ---------------------------------------------------------------

def test_k33_certificate():
    cert = integral_certificate(complete_bipartite(3, 3))
    assert cert.roots == ((3, 1), (0, 4), (-3, 1))
    assert cert.spectrum_string() == "3:1 0:4 -3:1"


def test_w_not_integral():
    roots, residual = integer_root_factorization(catalog.entry("w8").graph)
    assert residual == [1, 0, -12]
    assert roots == [(0, 6)]
    assert integral_certificate(catalog.entry("w8").graph) is None


def test_dk23_certificate():
    cert = integral_certificate(catalog.entry("dk23").graph)
    assert cert.roots == ((3, 1), (2, 1), (1, 2), (0, 2), (-1, 2), (-2, 1), (-3, 1))


@pytest.mark.parametrize("key", INTEGRAL_KEYS)
def test_certificate_invariants(key):
    g = catalog.entry(key).graph
    cert = integral_certificate(g)
    assert cert is not None
    cert.verify(g)
    m = cert.multiplicities
    assert sum(m.values()) == g.n
    assert sum(k * lam for lam, k in m.items()) == 0
    assert sum(k * lam * lam for lam, k in m.items()) == 2 * g.num_edges
    assert expand_roots(cert.roots) == list(cert.charpoly)
    for lam in cert.eigenvalues:
        assert poly_eval(cert.charpoly, lam) == 0
    # exact roots agree with the numerical spectrum, multiplicities by clustering
    assert cluster_spectrum(eigendecompose(g).eigenvalues) == list(cert.roots)


def test_certificate_verify_catches_tampering():
    g = complete(4)
    bad = IntegralCertificate([(3, 1), (-1, 2), (0, 1)], char_poly(g))
    with pytest.raises(CertificateError):
        bad.verify(g)


def test_format_certificate():
    cert = integral_certificate(complete_bipartite(3, 3))
    assert format_certificate(cert) == "3 1\n0 4\n-3 1\ncharpoly 1 0 -9 0 0 0 0"


def test_single_vertex():
    cert = integral_certificate(path(1))
    assert cert.roots == ((0, 1),) and cert.spectrum_string() == "0:1"


# -- projectors -----------------------------------------------------------------

def test_petersen_perron_projector():
    g = catalog.entry("petersen").graph
    projs = rational_projectors(g, integral_certificate(g))
    top = projs[0]
    assert top.lam == 3
    assert all(top.entry(i, j) == Fraction(1, 10) for i in range(1, 11) for j in range(1, 11))


def test_k33_zero_projector_bruteforce():
    g = complete_bipartite(3, 3)
    projs = {p.lam: p for p in rational_projectors(g, integral_certificate(g))}
    # oracle: I - E_3 - E_-3 with the rank-one Perron and signed vectors
    ones = np.ones(6)
    signed = np.array([1, 1, 1, -1, -1, -1])
    e0 = np.eye(6) - np.outer(ones, ones) / 6 - np.outer(signed, signed) / 6
    got = projs[0].to_float()
    assert np.allclose(got, e0, atol=1e-15)
    for i in range(1, 7):
        for j in range(1, 7):
            same = (i <= 3) == (j <= 3)
            want = Fraction(2, 3) if i == j else (Fraction(-1, 3) if same else Fraction(0))
            assert projs[0].entry(i, j) == want


@pytest.mark.parametrize("key", INTEGRAL_KEYS)
def test_projector_algebra_exact(key):
    g = catalog.entry(key).graph
    cert = integral_certificate(g)
    projs = rational_projectors(g, cert)
    check_projectors(g, projs)  # raises on any violation
    # independent Fraction-matrix check of resolution of identity and sum lam E = A
    n = g.n
    total = [[Fraction(0)] * n for _ in range(n)]
    weighted = [[Fraction(0)] * n for _ in range(n)]
    for p in projs:
        e = p.E
        for r in range(n):
            for c in range(n):
                total[r][c] += e[r, c]
                weighted[r][c] += p.lam * e[r, c]
    assert all(total[r][c] == (1 if r == c else 0) for r in range(n) for c in range(n))
    assert all(weighted[r][c] == int(g.adj[r, c]) for r in range(n) for c in range(n))
    for p in projs:
        assert sum(p.E[r, r] for r in range(n)) == cert.multiplicities[p.lam]


def test_projectors_reject_duplicate_lambda():
    g = complete(4)
    bad = IntegralCertificate([(3, 1), (-1, 2), (-1, 1)], char_poly(g))
    with pytest.raises(CertificateError):
        rational_projectors(g, bad)


def test_check_projectors_rejects_wrong_matrix():
    g = complete(4)
    projs = rational_projectors(g, integral_certificate(g))
    broken = RationalProjector(projs[0].lam, projs[0].numerator * 2, projs[0].denominator,
                               projs[0].multiplicity)
    with pytest.raises(CertificateError):
        check_projectors(g, [broken] + projs[1:])
