"""Independent ground truth for the closed forms.

Two kinds of oracle live here:

* adaptive quadrature (scipy's QUADPACK) for the low-dimensional auxiliary
  integrals and base cases, returning :class:`QuadResult`;
* exact eigenvalue (Weyl) integration for Hermitian and anti-Hermitian
  quaternionic matrices.  A unitarily invariant integrand reduces to a
  polynomial-weighted integral over the spectrum, which expands into products
  of Beta functions and is evaluated with :mod:`quatdom.exact`.  The
  normalising constant is fixed by a Gaussian integral computed both ways.

Recursion cross-checks in exact arithmetic are at the bottom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Optional

from scipy import integrate

from .closed_forms import (
    FormulaFamily,
    ParameterError,
    eval_H_herm,
    eval_I_herm,
    eval_J_sym,
    recursion_coefficient,
)
from .exact import ExactValue, NotRepresentable, as_rational, gamma_product
from .quaternion import Quaternion

HALF = Fraction(1, 2)
TOL_1D = 1e-10
TOL_2D = 1e-8


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_error_bound: float
    evaluations: int


def _quad(f, a, b, epsabs=TOL_1D, epsrel=1e-12, **kw):
    val, err, info = integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=200, full_output=1, **kw)[:3]
    return float(val), float(err), int(info["neval"])


def _gamma_ratio_float(nums, dens) -> float:
    s = sum(math.lgamma(float(x)) for x in nums) - sum(math.lgamma(float(x)) for x in dens)
    sign = 1.0
    for x in list(nums) + list(dens):
        if float(x) < 0 and math.floor(float(x)) % 2:
            sign = -sign
    return sign * math.exp(s)


# ball integral and auxiliary oracles ------------------------------------------


def ball_integral_oracle(m: int, mu, tol: float = TOL_1D) -> QuadResult:
    """Integral of (1 - |q|^2)^(mu - 1) over the unit ball of H^m, by radius."""
    mu = float(mu)
    if mu <= 0 or m < 1:
        raise ParameterError(f"ball integral needs m >= 1 and mu > 0, got m={m}, mu={mu}")
    surface = 2.0 * math.pi ** (2 * m) / math.gamma(2 * m)
    # (1 - r^2)^(mu-1) = (1 - r)^(mu-1) (1 + r)^(mu-1); QUADPACK takes the
    # endpoint factor as an algebraic weight
    f = lambda r: surface * (1.0 + r) ** (mu - 1.0) * r ** (4 * m - 1)
    val, err, nev = _quad(f, 0.0, 1.0, epsabs=tol, weight="alg", wvar=(0.0, mu - 1.0))
    return QuadResult(val, err, nev)


def ball_integral_closed_form(m: int, mu) -> float:
    return math.pi ** (2 * m) * _gamma_ratio_float([mu], [float(mu) + 2 * m])


def column_product_oracle(m: int, n: int, lam) -> QuadResult:
    """Column-by-column factorisation of the RI(m, n) integral into ball integrals."""
    value, err, nev = 1.0, 0.0, 0
    for j in range(1, n + 1):
        r = ball_integral_oracle(m, float(lam) + 2 * j - 1)
        err = err * abs(r.value) + abs(value) * r.abs_error_bound + err * r.abs_error_bound
        value *= r.value
        nev += r.evaluations
    return QuadResult(value, err, nev)


def quadratic_line_oracle(a, b, c, alpha, tol: float = TOL_1D) -> QuadResult:
    """Integral over the real line of (a x^2 + 2 b x + c)^(-alpha), tangent mapped."""
    a, b, c, alpha = float(a), float(b), float(c), float(alpha)
    if not (a > 0 and a * c - b * b > 0 and alpha > 0.5):
        raise ParameterError("need a > 0, ac - b^2 > 0 and alpha > 1/2")

    def f(t):
        x = math.tan(t)
        return (1.0 + x * x) * (a * x * x + 2 * b * x + c) ** (-alpha)

    half = math.pi / 2
    val, err, nev = _quad(f, -half, half, epsabs=tol)
    return QuadResult(val, err, nev)


def quadratic_line_closed_form(a, b, c, alpha) -> float:
    a, b, c, alpha = float(a), float(b), float(c), float(alpha)
    return (
        a ** (alpha - 1)
        * (a * c - b * b) ** (0.5 - alpha)
        * math.sqrt(math.pi)
        * _gamma_ratio_float([alpha - 0.5], [alpha])
    )


def quadratic_form_value(a, b: Quaternion, c, q: Quaternion) -> float:
    """``c + b conj(q) + q conj(b) + a |q|^2`` (a real number)."""
    cross = b * q.conj() + q * b.conj()
    return float(c) + cross.w + float(a) * q.norm_sq()


def quadratic_form_completed(a, b: Quaternion, c, q: Quaternion) -> float:
    """Same quantity written as ``K - |a| |q + b/a|^2`` with ``K = (|b|^2 - ac)/|a|``."""
    a, c = float(a), float(c)
    shifted = q + b * (1.0 / a)
    return (b.norm_sq() - a * c) / abs(a) - abs(a) * shifted.norm_sq()


def quadratic_ball_oracle(a, b: Quaternion, c, lam, tol: float = TOL_1D) -> QuadResult:
    """Integral of the quadratic form to the power lam over where it is positive.

    With ``a < 0`` the positivity region is a 4-ball around ``-b/a`` and the
    integral is radial.
    """
    a, c, lam = float(a), float(c), float(lam)
    disc = b.norm_sq() - a * c
    if not (a < 0 and disc > 0 and lam > -1):
        raise ParameterError("need a < 0, |b|^2 - ac > 0 and lambda > -1")
    k = disc / abs(a)
    radius = math.sqrt(k / abs(a))
    # substitute r = radius * t so the endpoint weight is (1 - t)^lam
    scale = k**lam * radius**4 * 2.0 * math.pi**2
    f = lambda t: scale * (1.0 + t) ** lam * t**3
    val, err, nev = _quad(f, 0.0, 1.0, epsabs=tol, weight="alg", wvar=(0.0, lam))
    return QuadResult(val, err, nev)


def quadratic_ball_closed_form(a, b: Quaternion, c, lam) -> float:
    a, c, lam = float(a), float(c), float(lam)
    disc = b.norm_sq() - a * c
    return (disc / abs(a)) ** (lam + 2) / a**2 * math.pi**2 / ((lam + 1) * (lam + 2))


def quarter_disk_target(a, b) -> float:
    """Closed-form shape of the quarter-disk integral, without a power-of-two constant."""
    a, b = float(a), float(b)
    return a ** (6 * b + 4) * math.sqrt(math.pi) * _gamma_ratio_float(
        [b + 1, b + 1, 2 * b + 2], [b + 1.5, 3 * b + 3]
    )


def quarter_disk_oracle(a, b, tol: float = TOL_2D) -> tuple[QuadResult, float]:
    """Quarter-disk integral of (a^2 - x^2 - y^2)^b (x y)^(2b+1).

    In polar coordinates the integrand separates into a radial factor
    (a^2 - r^2)^b r^(4b+3) and an angular factor (cos t sin t)^(2b+1); each is
    done by adaptive quadrature with algebraic endpoint weights.  Returns the
    value and the fitted constant ``value / quarter_disk_target(a, b)``.
    """
    a, b = float(a), float(b)
    if not (0 < a <= 1 and b > -1):
        raise ParameterError("need 0 < a <= 1 and b > -1")
    rad = lambda r: (a + r) ** b * r ** (4 * b + 3)
    rv, re, rn = _quad(rad, 0.0, a, epsabs=tol * 1e-2, weight="alg", wvar=(0.0, b))
    # (cos t sin t)^(2b+1) = (sin 2t / 2)^(2b+1); substitute s = 2t, symmetric about pi/2
    ang = lambda s: 0.5 * (math.sin(s) / 2.0) ** (2 * b + 1)
    av, ae, an = _quad(ang, 0.0, math.pi, epsabs=tol * 1e-2)
    val = rv * av
    err = abs(rv) * ae + abs(av) * re + re * ae
    res = QuadResult(val, err, rn + an)
    return res, val / quarter_disk_target(a, b)


def anti_hermitian_n1_oracle(lam, tol: float = TOL_1D) -> QuadResult:
    """Integral of (1 - r^2)^lam over the unit 3-ball (the RIII(1) domain)."""
    lam = float(lam)
    if not lam > -1:
        raise ParameterError("need lambda > -1")
    f = lambda r: 4.0 * math.pi * (1.0 + r) ** lam * r * r
    val, err, nev = _quad(f, 0.0, 1.0, epsabs=tol, weight="alg", wvar=(0.0, lam))
    return QuadResult(val, err, nev)


# fourth domain: reduced two-dimensional form --------------------------------


def rIV_reduced_integral(n: int, alpha, beta, tol: float = TOL_2D) -> QuadResult:
    """Double integral of (1-(r+u)^2)^alpha (1-(r-u)^2)^beta r^(n-1) u^(3n-4).

    The region is r, u > 0, r + u < 1.  With v = r + u and r = v t the outer
    integral carries the algebraic weight (1 - v)^alpha.
    """
    alpha, beta = float(alpha), float(beta)
    evals = 0
    inner_err = 0.0

    def inner(v):
        nonlocal evals, inner_err
        g = lambda t: (1.0 - (v * (2 * t - 1)) ** 2) ** beta * t ** (n - 1) * (1 - t) ** (3 * n - 4)
        val, err, nev = _quad(g, 0.0, 1.0, epsabs=tol * 1e-3, epsrel=1e-11)
        evals += nev
        inner_err = max(inner_err, err)
        return val * (1.0 + v) ** alpha * v ** (4 * n - 4)

    val, err, nev = _quad(inner, 0.0, 1.0, epsabs=tol, epsrel=1e-10, weight="alg", wvar=(0.0, alpha))
    return QuadResult(val, err + inner_err, evals + nev)


def rIV_reduced_prefactor(n: int, alpha, beta) -> ExactValue:
    """Exact constant turning the reduced double integral into L_n(alpha, beta).

    Product of the polar-reduction constant and the outer Beta-type factor;
    the gamma arguments are half-integers for rational half-integer inputs.
    """
    a, b = as_rational(alpha), as_rational(beta)
    s = 2 * n + a + b
    outer = ExactValue(Fraction(2) ** (4 * n - 3), 3) * gamma_product([s - HALF], [s + 1])
    reduce_ = ExactValue(Fraction(1, 2) ** (4 * n - 5), 4 * n - 3) * gamma_product(
        [], [Fraction(n, 2), Fraction(3 * (n - 1), 2)]
    )
    return outer * reduce_


def rIV_reduced_oracle(n: int, alpha, beta, tol: float = TOL_2D) -> QuadResult:
    """L_n(alpha, beta) from the reduced double integral and its exact prefactor."""
    a, b = as_rational(alpha), as_rational(beta)
    if n < 2 or not a > -1 or not b > -(n + a):
        raise ParameterError("need n >= 2, alpha > -1 and beta > -(n + alpha)")
    p = rIV_reduced_integral(n, a, b, tol)
    c = rIV_reduced_prefactor(n, a, b).to_float()
    return QuadResult(c * p.value, abs(c) * p.abs_error_bound, p.evaluations)


# exact eigenvalue integration ---------------------------------------------------


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


def _binomial_power(n: int, i: int, j: int, power: int, step: int) -> dict:
    """(x_i^step - x_j^step)^power as an exponent dict."""
    out = {}
    for k in range(power + 1):
        e = [0] * n
        e[i] = (power - k) * step
        e[j] = k * step
        out[tuple(e)] = math.comb(power, k) * (-1) ** k
    return out


@lru_cache(maxsize=None)
def hermitian_weight(n: int) -> tuple:
    """Monomials of prod_{i<j} (x_i - x_j)^4, the eigenvalue density of Hermitian Q."""
    p = {(0,) * n: 1}
    for i, j in combinations(range(n), 2):
        p = _poly_mul(p, _binomial_power(n, i, j, 4, 1))
    return tuple(sorted(p.items()))


@lru_cache(maxsize=None)
def anti_hermitian_weight(n: int) -> tuple:
    """Monomials of prod_{i<j} (t_i^2 - t_j^2)^2 prod_i t_i^2 for anti-Hermitian H.

    The ``t_i >= 0`` are the moduli of the eigenvalues of H.
    """
    p = {(2,) * n: 1}
    for i, j in combinations(range(n), 2):
        p = _poly_mul(p, _binomial_power(n, i, j, 2, 2))
    return tuple(sorted(p.items()))


def _spectral_sum(weight, moment) -> ExactValue:
    total = ExactValue(0)
    cache = {}
    for e, c in weight:
        if any(k % 2 for k in e):
            continue
        term = ExactValue(c)
        for k in e:
            if k not in cache:
                cache[k] = moment(k)
            term = term * cache[k]
        total = total + term
    return total


@lru_cache(maxsize=None)
def hermitian_constant(n: int) -> ExactValue:
    """c_n with  int f(Q) dQ = c_n int f(x) prod_{i<j}(x_i - x_j)^4 dx.

    Fixed by exp(-tr Q^2): over the entries it is pi^(n/2) (pi^2/4)^(n(n-1)/2).
    """
    pairs = n * (n - 1) // 2
    gauss_entries = ExactValue(Fraction(1, 4) ** pairs, n + 4 * pairs)
    gauss_spectrum = _spectral_sum(hermitian_weight(n), lambda k: gamma_product([Fraction(k + 1, 2)]))
    return gauss_entries / gauss_spectrum


@lru_cache(maxsize=None)
def anti_hermitian_constant(n: int) -> ExactValue:
    """Same normalisation for anti-Hermitian H with exp(-sum of squared entries)."""
    pairs = n * (n - 1) // 2
    gauss_entries = ExactValue(Fraction(1, 4) ** pairs, 3 * n + 4 * pairs)
    gauss_spectrum = _spectral_sum(
        anti_hermitian_weight(n), lambda k: gamma_product([Fraction(k + 1, 2)]) * Fraction(1, 2)
    )
    return gauss_entries / gauss_spectrum


def spectral_I_herm(n: int, lam) -> ExactValue:
    """Exact integral of det(I - Q^2)^lam over Hermitian Q with I - Q^2 > 0."""
    lam = as_rational(lam)
    if not lam > -1:
        raise ParameterError("need lambda > -1")
    # int_{-1}^{1} x^k (1-x^2)^lam dx = B((k+1)/2, lam+1)
    moment = lambda k: gamma_product([Fraction(k + 1, 2), lam + 1], [Fraction(k + 1, 2) + lam + 1])
    return hermitian_constant(n) * _spectral_sum(hermitian_weight(n), moment)


def spectral_H_herm(n: int, alpha) -> ExactValue:
    """Exact integral of det(I + Q^2)^(-alpha) over all Hermitian Q."""
    alpha = as_rational(alpha)
    if not alpha > 2 * n - Fraction(3, 2):
        raise ParameterError(f"need alpha > 2n - 3/2 = {2 * n - Fraction(3, 2)}")
    # int x^k (1+x^2)^(-alpha) dx = Gamma((k+1)/2) Gamma(alpha - (k+1)/2) / Gamma(alpha)
    moment = lambda k: gamma_product([Fraction(k + 1, 2), alpha - Fraction(k + 1, 2)], [alpha])
    return hermitian_constant(n) * _spectral_sum(hermitian_weight(n), moment)


def spectral_K_anti(n: int, lam) -> ExactValue:
    """Exact integral of det(I + H^2)^lam over anti-Hermitian H with I + H^2 > 0."""
    lam = as_rational(lam)
    if not lam > -1:
        raise ParameterError("need lambda > -1")
    # int_0^1 t^k (1-t^2)^lam dt = B((k+1)/2, lam+1) / 2
    moment = lambda k: gamma_product([Fraction(k + 1, 2), lam + 1], [Fraction(k + 1, 2) + lam + 1]) * HALF
    return anti_hermitian_constant(n) * _spectral_sum(anti_hermitian_weight(n), moment)


def spectral_oracle(family: FormulaFamily) -> Optional[ExactValue]:
    """Exact eigenvalue-integration value for H_herm, I_herm and K_anti, else None."""
    try:
        if family.tag == "H_herm":
            return spectral_H_herm(family.n, family.alpha)
        if family.tag == "I_herm":
            return spectral_I_herm(family.n, family.lam)
        if family.tag == "K_anti":
            return spectral_K_anti(family.n, family.lam)
    except NotRepresentable:
        return None
    return None


# recursion cross-checks -------------------------------------------------------


@dataclass(frozen=True)
class RecursionReport:
    tag: str
    n: int
    param: Fraction
    lhs: ExactValue
    rhs: ExactValue
    equal: bool
    ratio: ExactValue
    difference: Optional[ExactValue]
    variant_values: dict = field(default_factory=dict)
    matching_variants: tuple = ()


def _statement(tag: str, n: int, param) -> ExactValue:
    if tag == "H_herm":
        return eval_H_herm(n, param, "statement").value
    if tag == "I_herm":
        return eval_I_herm(n, param, "statement")
    if tag == "J_sym":
        return eval_J_sym(n, param, "statement")
    raise ValueError(f"{tag} has no recursion in the matrix size")


def recursion_check(tag: str, n: int, param) -> RecursionReport:
    """Does the printed formula satisfy the proof recursion at size n?

    Compares ``F(n, p)`` against ``coef(n, p) * F(n - 1, p + shift)`` with F the
    printed statement, in exact arithmetic.  For H_herm it also lists which
    printed variants equal the fully unrolled recursion.
    """
    if n < 2:
        raise ValueError("recursion_check needs n >= 2")
    param = as_rational(param)
    coef, shift = recursion_coefficient(tag, n, param)
    lhs = _statement(tag, n, param)
    rhs = coef * _statement(tag, n - 1, param + shift)
    diff = None
    if lhs.pi_half_power == rhs.pi_half_power and lhs.three_half_power == rhs.three_half_power:
        diff = lhs - rhs
    variants: dict = {}
    matching: tuple = ()
    if tag == "H_herm":
        unrolled = eval_H_herm(n, param, "proof_recursion").value
        variants = {
            src: eval_H_herm(n, param, src).value for src in ("statement", "proof_final_line", "proof_recursion")
        }
        matching = tuple(src for src in ("statement", "proof_final_line") if variants[src] == unrolled)
    elif tag in ("I_herm", "J_sym"):
        ev = eval_I_herm if tag == "I_herm" else eval_J_sym
        variants = {src: ev(n, param, src) for src in ("statement", "proof_recursion")}
        matching = tuple(src for src in ("statement",) if variants[src] == variants["proof_recursion"])
    return RecursionReport(
        tag=tag,
        n=n,
        param=param,
        lhs=lhs,
        rhs=rhs,
        equal=lhs == rhs,
        ratio=lhs / rhs,
        difference=diff,
        variant_values=variants,
        matching_variants=matching,
    )


def refine_check(oracle, *args, tol: float) -> tuple[QuadResult, QuadResult]:
    """Run an oracle at ``tol`` and ``tol / 2`` (for error-bound honesty checks)."""
    return oracle(*args, tol=tol), oracle(*args, tol=tol / 2)


__all__ = [
    "QuadResult",
    "RecursionReport",
    "anti_hermitian_n1_oracle",
    "ball_integral_oracle",
    "ball_integral_closed_form",
    "column_product_oracle",
    "quadratic_line_oracle",
    "quadratic_line_closed_form",
    "quadratic_ball_oracle",
    "quadratic_ball_closed_form",
    "quadratic_form_value",
    "quadratic_form_completed",
    "quarter_disk_oracle",
    "quarter_disk_target",
    "rIV_reduced_integral",
    "rIV_reduced_prefactor",
    "rIV_reduced_oracle",
    "hermitian_constant",
    "anti_hermitian_constant",
    "spectral_H_herm",
    "spectral_I_herm",
    "spectral_K_anti",
    "spectral_oracle",
    "recursion_check",
    "refine_check",
]
