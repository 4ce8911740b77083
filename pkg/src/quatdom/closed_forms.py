"""Exact evaluators for the closed-form integrals over quaternionic domains.

Each family is evaluated from its printed product formula and, where a
recursion in the matrix size is available, by unrolling that recursion.  The
two routes are kept side by side as :class:`FormulaVariant` values because they
do not always agree (see :func:`eval_H_herm` and :func:`eval_I_herm`).

Families (integrands are Moore determinants):

========  =============================================  ==========================
tag       integral                                       region
========  =============================================  ==========================
J_rect    det(I - Q Q*)^lam,  Q m x n                    I - Q Q* > 0
K_rect    det(I + Q Q*)^-alpha, Q m x n                  all Q
H_herm    det(I + Q^2)^-alpha, Q Hermitian n x n         all Q
I_herm    det(I - Q^2)^lam,  Q Hermitian                 I - Q^2 > 0
J_sym     det(I - Q conj(Q))^lam, Q symmetric            I - Q conj(Q) > 0
K_anti    det(I + H^2)^lam,  H anti-Hermitian            I + H^2 > 0
L_four    (1-s-d)^alpha (1-s+d)^beta, q in H^n           fourth classical domain
========  =============================================  ==========================
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .exact import (
    ExactValue,
    as_rational,
    binomial_exact,
    gamma_product,
    hyp3f2_terminating,
)

FAMILY_TAGS = ("J_rect", "K_rect", "H_herm", "I_herm", "J_sym", "K_anti", "L_four")
SOURCES = ("statement", "proof_final_line", "proof_recursion")

HALF = Fraction(1, 2)


class ParameterError(ValueError):
    """Shape or exponent outside the range where the integral converges."""


@dataclass(frozen=True)
class FormulaVariant:
    source: str
    value: ExactValue


@dataclass(frozen=True)
class FormulaFamily:
    """A family tag plus its shape and exponent parameters.

    ``lam`` is used by J_rect, I_herm, J_sym and K_anti; ``alpha`` by K_rect,
    H_herm and L_four; ``beta`` only by L_four.
    """

    tag: str
    n: int
    m: int = 1
    lam: Optional[Fraction] = None
    alpha: Optional[Fraction] = None
    beta: Optional[Fraction] = None

    def __post_init__(self):
        if self.tag not in FAMILY_TAGS:
            raise ParameterError(f"unknown family {self.tag!r}")
        for name in ("lam", "alpha", "beta"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, as_rational(v))
        _check_params(self)

    @property
    def exponent(self) -> Fraction:
        return self.lam if self.lam is not None else self.alpha

    @property
    def bounded(self) -> bool:
        return self.tag not in ("K_rect", "H_herm")

    @property
    def is_volume(self) -> bool:
        if self.tag == "L_four":
            return self.alpha == 0 and self.beta == 0
        return self.bounded and self.lam == 0

    def params(self) -> dict:
        out = {"n": self.n}
        if self.tag in ("J_rect", "K_rect"):
            out = {"m": self.m, "n": self.n}
        for name in ("lam", "alpha", "beta"):
            v = getattr(self, name)
            if v is not None:
                out[name] = str(v)
        return out

    def label(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self.params().items())
        return f"{self.tag}({inner})"

    def exact(self) -> ExactValue:
        """Reference value (proof-recursion variant where one exists)."""
        return evaluate(self).value

    def variants(self) -> list[FormulaVariant]:
        return all_variants(self)


def J_rect(m, n, lam=0) -> FormulaFamily:
    return FormulaFamily("J_rect", n=n, m=m, lam=lam)


def K_rect(m, n, alpha) -> FormulaFamily:
    return FormulaFamily("K_rect", n=n, m=m, alpha=alpha)


def H_herm(n, alpha) -> FormulaFamily:
    return FormulaFamily("H_herm", n=n, alpha=alpha)


def I_herm(n, lam=0) -> FormulaFamily:
    return FormulaFamily("I_herm", n=n, lam=lam)


def J_sym(n, lam=0) -> FormulaFamily:
    return FormulaFamily("J_sym", n=n, lam=lam)


def K_anti(n, lam=0) -> FormulaFamily:
    return FormulaFamily("K_anti", n=n, lam=lam)


def L_four(n, alpha=0, beta=0) -> FormulaFamily:
    return FormulaFamily("L_four", n=n, alpha=alpha, beta=beta)


def _check_params(f: FormulaFamily) -> None:
    if int(f.n) != f.n or f.n < 1 or int(f.m) != f.m or f.m < 1:
        raise ParameterError(f"shape must be positive integers, got m={f.m}, n={f.n}")
    needs = {
        "J_rect": ("lam",),
        "K_rect": ("alpha",),
        "H_herm": ("alpha",),
        "I_herm": ("lam",),
        "J_sym": ("lam",),
        "K_anti": ("lam",),
        "L_four": ("alpha", "beta"),
    }[f.tag]
    for name in needs:
        if getattr(f, name) is None:
            raise ParameterError(f"{f.tag} needs parameter {name}")
    m, n = f.m, f.n
    if f.tag in ("J_rect", "I_herm", "J_sym", "K_anti") and not f.lam > -1:
        raise ParameterError(f"{f.tag} requires lambda > -1, got {f.lam}")
    if f.tag == "K_rect" and not f.alpha > 2 * m + 2 * n - 2:
        raise ParameterError(f"K_rect requires alpha > 2m+2n-2 = {2 * m + 2 * n - 2}, got {f.alpha}")
    if f.tag == "H_herm" and not f.alpha > 2 * n - Fraction(3, 2):
        raise ParameterError(f"H_herm requires alpha > 2n-3/2 = {2 * n - Fraction(3, 2)}, got {f.alpha}")
    if f.tag == "L_four":
        if not f.alpha > -1:
            raise ParameterError(f"L_four requires alpha > -1, got {f.alpha}")
        if not f.beta > -(n + f.alpha):
            raise ParameterError(f"L_four requires beta > -(n+alpha) = {-(n + f.alpha)}, got {f.beta}")


def _pi(half_power) -> ExactValue:
    return ExactValue.pi_power(int(half_power))


# evaluators ------------------------------------------------------------------


def eval_J_rect(m: int, n: int, lam=0) -> ExactValue:
    """pi^(2mn) prod_j G(lam+2j-1) prod_k G(lam+2k-1) / prod_l G(lam+2l-1)."""
    lam = J_rect(m, n, lam).lam
    nums = [lam + 2 * j - 1 for j in range(1, n + 1)] + [lam + 2 * k - 1 for k in range(1, m + 1)]
    dens = [lam + 2 * l - 1 for l in range(1, n + m + 1)]
    return _pi(4 * m * n) * gamma_product(nums, dens)


def eval_J_rect_columns(m: int, n: int, lam=0) -> ExactValue:
    """Same integral as a product of n ball integrals, one per column."""
    lam = J_rect(m, n, lam).lam
    out = ExactValue(1)
    for j in range(1, n + 1):
        out = out * _pi(4 * m) * gamma_product([lam + 2 * j - 1], [lam + 2 * j + 2 * m - 1])
    return out


def eval_K_rect(m: int, n: int, alpha) -> ExactValue:
    alpha = K_rect(m, n, alpha).alpha
    nums = [alpha - 2 * j - 2 * m for j in range(n)]
    dens = [alpha - 2 * j for j in range(n)]
    return _pi(4 * m * n) * gamma_product(nums, dens)


def _H_product(n: int, alpha: Fraction, step: int) -> ExactValue:
    nums = [alpha - 2 * j - HALF for j in range(n)]
    dens = [alpha - 2 * j for j in range(n)]
    nums += [2 * alpha - 2 * n - step * k + 1 for k in range(n - 1)]
    dens += [2 * alpha - 4 * k - 1 for k in range(n - 1)]
    return ExactValue(Fraction(2) ** (n * (n - 1))) * _pi(2 * n * n - n) * gamma_product(nums, dens)


def H_recursion_coefficient(n: int, alpha) -> ExactValue:
    """H_n(alpha) = coef * H_{n-1}(alpha - 2), as printed (including 4^(n-1))."""
    alpha = as_rational(alpha)
    return (
        ExactValue(Fraction(4) ** (n - 1))
        * _pi(4 * n - 3)
        * gamma_product([2 * alpha - 2 * n + 1, alpha - HALF], [alpha, 2 * alpha - 1])
    )


def _H_base(alpha: Fraction) -> ExactValue:
    return _pi(1) * gamma_product([alpha - HALF], [alpha])


def eval_H_herm(n: int, alpha, variant: str = "proof_recursion") -> FormulaVariant:
    """Arctan-type integral over Hermitian matrices.

    ``statement`` and ``proof_final_line`` are the two printed products (they
    differ in the step of the ``Gamma(2alpha-2n-.k+1)`` factor once n >= 3);
    ``proof_recursion`` unrolls the printed recursion down to H_1.
    """
    alpha = H_herm(n, alpha).alpha
    if variant == "statement":
        value = _H_product(n, alpha, 2)
    elif variant == "proof_final_line":
        value = _H_product(n, alpha, 4)
    elif variant == "proof_recursion":
        value = _H_base(alpha - 2 * (n - 1))
        for k in range(2, n + 1):
            value = value * H_recursion_coefficient(k, alpha - 2 * (n - k))
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return FormulaVariant(variant, value)


def I_recursion_coefficient(n: int, lam) -> ExactValue:
    lam = as_rational(lam)
    return _pi(4 * n - 3) * gamma_product([lam + 1, 2 * lam + 2], [lam + HALF + 1, 2 * lam + 2 * n])


def _I_base(lam: Fraction) -> ExactValue:
    return _pi(1) * gamma_product([lam + 1], [lam + Fraction(3, 2)])


def eval_I_herm(n: int, lam=0, variant: str = "proof_recursion") -> ExactValue:
    """Integral of det(I - Q^2)^lam over Hermitian Q with I - Q^2 > 0.

    The printed product (``variant="statement"``) carries
    ``Gamma(2lam+2n+4k)`` in its second denominator, while unrolling the
    recursion produces ``Gamma(2lam+2n+2k)``; the two coincide for n <= 2.
    """
    lam = I_herm(n, lam).lam
    if variant == "statement":
        nums = [lam + 2 * j + 1 for j in range(n)] + [2 * lam + 4 * k + 2 for k in range(n - 1)]
        dens = [lam + 2 * j + Fraction(3, 2) for j in range(n)] + [2 * lam + 2 * n + 4 * k for k in range(n - 1)]
        return _pi(2 * n * n - n) * gamma_product(nums, dens)
    if variant == "proof_recursion":
        value = _I_base(lam + 2 * (n - 1))
        for k in range(2, n + 1):
            value = value * I_recursion_coefficient(k, lam + 2 * (n - k))
        return value
    raise ValueError(f"unknown variant {variant!r}")


def vol_RII(n: int) -> ExactValue:
    return eval_I_herm(n, 0)


def J_sym_recursion_coefficient(n: int, lam) -> ExactValue:
    lam = as_rational(lam)
    return _pi(4 * n) * gamma_product([lam + 1, 2 * lam + 5], [lam + 3, 2 * lam + 2 * n + 3])


def eval_J_sym(n: int, lam=0, variant: str = "proof_recursion") -> ExactValue:
    """Integral of det(I - Q conj(Q))^lam over symmetric quaternionic Q.

    The recursion is the reference; the printed product (numerator gammas in
    steps of 4, denominator gammas in steps of 2) is reproduced as
    ``variant="statement"``.
    """
    lam = J_sym(n, lam).lam
    if variant == "statement":
        nums = [lam + 1] + [2 * lam + 4 * k + 5 for k in range(n - 1)]
        dens = [lam + 2 * n + 1] + [2 * lam + 2 * n + 2 * k + 3 for k in range(n - 1)]
        return _pi(2 * n * (n + 1)) * gamma_product(nums, dens)
    if variant == "proof_recursion":
        value = _J_sym_base(lam + 2 * (n - 1))
        for k in range(2, n + 1):
            value = value * J_sym_recursion_coefficient(k, lam + 2 * (n - k))
        return value
    raise ValueError(f"unknown variant {variant!r}")


def _J_sym_base(lam: Fraction) -> ExactValue:
    return _pi(4) * gamma_product([lam + 1], [lam + 3])


def vol_Sym(n: int) -> ExactValue:
    return eval_J_sym(n, 0)


def eval_K_anti(n: int, lam=0) -> ExactValue:
    lam = K_anti(n, lam).lam
    power = ExactValue(Fraction(1), 3 * n * (n + 1) // 2, -(n * (n + 1) // 2))
    nums = [lam + 1] + [2 * lam + 3 * j + 1 for j in range(1, n)]
    dens = [lam + Fraction(3 * n, 2) + 1] + [2 * lam + Fraction(3 * (n + j), 2) + 1 for j in range(1, n)]
    return power * gamma_product(nums, dens)


def vol_RIII(n: int) -> ExactValue:
    return eval_K_anti(n, 0)


def L_four_prefactor(n: int, alpha, beta) -> ExactValue:
    a, b = as_rational(alpha), as_rational(beta)
    return (
        ExactValue(Fraction(2) ** (5 - 4 * n))
        * _pi(4 * n + 2)
        * gamma_product(
            [n, a + 1, 1 + n + a + b],
            [Fraction(n, 2), Fraction(3 * (n - 1), 2), a + n + 1, 2 * n + a + b + 1, Fraction(5, 2) - n],
        )
    )


def L_four_hypergeometric_sum(n: int, alpha, beta) -> ExactValue:
    a, b = as_rational(alpha), as_rational(beta)
    total = ExactValue(0)
    for i in range(1, n):
        term = binomial_exact(2 * n - 3, 2 * i - 1) * hyp3f2_terminating(
            i, n, 1 + n + a + b, a + n + 1, Fraction(5, 2) - n
        )
        total = total + term
    return total


def eval_L_four(n: int, alpha=0, beta=0) -> ExactValue:
    f = L_four(n, alpha, beta)
    a, b = f.alpha, f.beta
    if n == 1:
        return _pi(4) / ((a + b + 1) * (a + b + 2))
    return L_four_prefactor(n, a, b) * L_four_hypergeometric_sum(n, a, b)


def vol_RIV(n: int) -> ExactValue:
    return eval_L_four(n, 0, 0)


# dispatch -------------------------------------------------------------------


def evaluate(f: FormulaFamily, variant: Optional[str] = None) -> FormulaVariant:
    t = f.tag
    if t == "H_herm":
        return eval_H_herm(f.n, f.alpha, variant or "proof_recursion")
    if t == "I_herm":
        v = variant or "proof_recursion"
        return FormulaVariant(v, eval_I_herm(f.n, f.lam, v))
    if t == "J_sym":
        v = variant or "proof_recursion"
        return FormulaVariant(v, eval_J_sym(f.n, f.lam, v))
    if t == "J_rect":
        v = variant or "statement"
        if v == "statement":
            return FormulaVariant(v, eval_J_rect(f.m, f.n, f.lam))
        if v == "proof_recursion":
            return FormulaVariant(v, eval_J_rect_columns(f.m, f.n, f.lam))
        raise ValueError(f"unknown variant {v!r}")
    if variant not in (None, "statement"):
        raise ValueError(f"{t} has only the printed statement")
    if t == "K_rect":
        return FormulaVariant("statement", eval_K_rect(f.m, f.n, f.alpha))
    if t == "K_anti":
        return FormulaVariant("statement", eval_K_anti(f.n, f.lam))
    return FormulaVariant("statement", eval_L_four(f.n, f.alpha, f.beta))


def all_variants(f: FormulaFamily) -> list[FormulaVariant]:
    sources = {
        "H_herm": ("statement", "proof_final_line", "proof_recursion"),
        "I_herm": ("statement", "proof_recursion"),
        "J_sym": ("statement", "proof_recursion"),
        "J_rect": ("statement", "proof_recursion"),
    }.get(f.tag, ("statement",))
    return [evaluate(f, s) for s in sources]


def recursion_coefficient(tag: str, n: int, param) -> tuple[ExactValue, Fraction]:
    """(coefficient, parameter shift) of the size-n to size-(n-1) recursion."""
    if tag == "H_herm":
        return H_recursion_coefficient(n, param), Fraction(-2)
    if tag == "I_herm":
        return I_recursion_coefficient(n, param), Fraction(2)
    if tag == "J_sym":
        return J_sym_recursion_coefficient(n, param), Fraction(2)
    raise ValueError(f"{tag} has no recursion in the matrix size")
