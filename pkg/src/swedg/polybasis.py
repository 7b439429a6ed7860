"""Orthonormal polynomial bases and quadrature on the reference interval and triangle.

The 1D reference element is [-1, 1].  The 2D reference element is the
right triangle with vertices (-1,-1), (1,-1), (-1,1); its area is 2.
All bases are orthonormal with respect to the plain Lebesgue measure on
the reference element.
"""

import numpy as np
from scipy import special


def jacobi_p(x, alpha, beta, n):
    """Evaluate the orthonormal Jacobi polynomial of order n at points x.

    Normalized so that int_{-1}^{1} P_n^2 (1-x)^alpha (1+x)^beta dx = 1.
    """
    x = np.asarray(x, dtype=float)
    apb = alpha + beta
    gamma0 = (2.0 ** (apb + 1) / (apb + 1.0)
              * special.gamma(alpha + 1) * special.gamma(beta + 1)
              / special.gamma(apb + 1))
    p0 = np.full_like(x, 1.0 / np.sqrt(gamma0))
    if n == 0:
        return p0
    gamma1 = (alpha + 1.0) * (beta + 1.0) / (apb + 3.0) * gamma0
    p1 = ((apb + 2.0) * x / 2.0 + (alpha - beta) / 2.0) / np.sqrt(gamma1)
    if n == 1:
        return p1
    aold = 2.0 / (2.0 + apb) * np.sqrt((alpha + 1.0) * (beta + 1.0) / (apb + 3.0))
    pm1, p = p0, p1
    for i in range(1, n):
        h1 = 2.0 * i + apb
        anew = (2.0 / (h1 + 2.0)
                * np.sqrt((i + 1.0) * (i + 1.0 + apb) * (i + 1.0 + alpha)
                          * (i + 1.0 + beta) / (h1 + 1.0) / (h1 + 3.0)))
        bnew = -(alpha * alpha - beta * beta) / (h1 * (h1 + 2.0))
        pnew = (-aold * pm1 + (x - bnew) * p) / anew
        pm1, p = p, pnew
        aold = anew
    return p


def grad_jacobi_p(x, alpha, beta, n):
    """Derivative of the orthonormal Jacobi polynomial of order n."""
    x = np.asarray(x, dtype=float)
    if n == 0:
        return np.zeros_like(x)
    return np.sqrt(n * (n + alpha + beta + 1.0)) * jacobi_p(x, alpha + 1, beta + 1, n - 1)


def gauss_legendre(n):
    """n-point Gauss-Legendre rule on [-1, 1]; exact for degree 2n-1."""
    x, w = special.roots_legendre(n)
    return x, w


def gauss_lobatto(n):
    """n-point Gauss-Lobatto rule on [-1, 1]; exact for degree 2n-3 (n >= 2)."""
    if n < 2:
        raise ValueError("Lobatto rule needs at least 2 points")
    if n == 2:
        x = np.array([-1.0, 1.0])
    else:
        xi, _ = special.roots_jacobi(n - 2, 1.0, 1.0)
        x = np.concatenate(([-1.0], np.sort(xi), [1.0]))
    # w_i = 2 / (n(n-1) P_{n-1}(x_i)^2) with P the classical Legendre polynomial
    pn = special.eval_legendre(n - 1, x)
    w = 2.0 / (n * (n - 1) * pn ** 2)
    return x, w


def vandermonde_1d(n_deg, x):
    """Vandermonde matrix of the orthonormal Legendre basis, V[i, j] = P_j(x_i)."""
    x = np.asarray(x, dtype=float)
    return np.column_stack([jacobi_p(x, 0, 0, j) for j in range(n_deg + 1)])


def grad_vandermonde_1d(n_deg, x):
    x = np.asarray(x, dtype=float)
    return np.column_stack([grad_jacobi_p(x, 0, 0, j) for j in range(n_deg + 1)])


def _rs_to_ab(r, s):
    """Collapsed coordinate map for the reference triangle (a = -1 at the apex)."""
    ok = np.abs(1.0 - s) > 1e-14
    denom = np.where(ok, 1.0 - s, 1.0)
    a = np.where(ok, 2.0 * (1.0 + r) / denom - 1.0, -1.0)
    return a, s


def simplex_2d(r, s, i, j):
    """Orthonormal Dubiner basis function (i, j) on the reference triangle."""
    a, b = _rs_to_ab(np.asarray(r, float), np.asarray(s, float))
    h1 = jacobi_p(a, 0, 0, i)
    h2 = jacobi_p(b, 2 * i + 1, 0, j)
    return np.sqrt(2.0) * h1 * h2 * (1.0 - b) ** i


def grad_simplex_2d(r, s, i, j):
    """Gradient (d/dr, d/ds) of the Dubiner basis function (i, j)."""
    a, b = _rs_to_ab(np.asarray(r, float), np.asarray(s, float))
    fa = jacobi_p(a, 0, 0, i)
    dfa = grad_jacobi_p(a, 0, 0, i)
    gb = jacobi_p(b, 2 * i + 1, 0, j)
    dgb = grad_jacobi_p(b, 2 * i + 1, 0, j)

    # d/dr: da/dr = 2/(1-b)
    dmodedr = dfa * gb
    if i > 0:
        dmodedr = dmodedr * (0.5 * (1.0 - b)) ** (i - 1)
    # d/ds: da/ds = (1+a)/(1-b)
    dmodeds = dfa * gb * (0.5 * (1.0 + a))
    if i > 0:
        dmodeds = dmodeds * (0.5 * (1.0 - b)) ** (i - 1)
    tmp = dgb * (0.5 * (1.0 - b)) ** i
    if i > 0:
        tmp = tmp - 0.5 * i * gb * (0.5 * (1.0 - b)) ** (i - 1)
    dmodeds = dmodeds + fa * tmp

    scale = 2.0 ** (i + 0.5)
    return scale * dmodedr, scale * dmodeds


def _basis_indices(n_deg):
    return [(i, j) for i in range(n_deg + 1) for j in range(n_deg - i + 1)]


def vandermonde_2d(n_deg, r, s):
    """Dubiner Vandermonde matrix on the triangle; columns ordered by (i, j)."""
    r = np.asarray(r, float).ravel()
    s = np.asarray(s, float).ravel()
    cols = [simplex_2d(r, s, i, j) for (i, j) in _basis_indices(n_deg)]
    return np.column_stack(cols)


def grad_vandermonde_2d(n_deg, r, s):
    r = np.asarray(r, float).ravel()
    s = np.asarray(s, float).ravel()
    vr, vs = [], []
    for (i, j) in _basis_indices(n_deg):
        dr, ds = grad_simplex_2d(r, s, i, j)
        vr.append(dr)
        vs.append(ds)
    return np.column_stack(vr), np.column_stack(vs)


def triangle_quadrature(degree):
    """Positive quadrature on the reference triangle, exact to the given degree.

    Built as a collapsed tensor product of Gauss-Legendre and Gauss-Jacobi(1,0)
    rules, so exactness holds for all polynomials of total degree <= degree.
    """
    n = degree // 2 + 1
    xa, wa = special.roots_legendre(n)
    xb, wb = special.roots_jacobi(n, 1.0, 0.0)
    a, b = np.meshgrid(xa, xb, indexing="ij")
    r = 0.5 * (1.0 + a) * (1.0 - b) - 1.0
    s = b
    w = 0.5 * np.outer(wa, wb)
    return r.ravel(), s.ravel(), w.ravel()


def triangle_monomial_integral(a, b):
    """Exact integral of x^a y^b over the reference triangle (as a float)."""
    # substitute x = 2u - 1, y = 2v - 1 and expand over the unit simplex,
    # where int u^i v^j = i! j! / (i + j + 2)!
    from fractions import Fraction
    from math import comb, factorial

    total = Fraction(0)
    for i in range(a + 1):
        for j in range(b + 1):
            c = (comb(a, i) * comb(b, j)
                 * 2 ** (i + j) * (-1) ** (a - i + b - j))
            total += Fraction(c * factorial(i) * factorial(j), factorial(i + j + 2))
    return float(4 * total)
