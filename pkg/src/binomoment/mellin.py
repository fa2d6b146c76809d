"""Multiplicative (Mellin) structure of the binomial moment family.

The measure with moments C(n*p+r, n), p = k/l > 1 and -1 < r <= p-1, factors
as a Mellin product of k modified beta distributions followed by a dilation
to [0, c(p)].  This module builds that factorization, evaluates moments of
the factors and the product, draws product samples, and provides the small
measure algebra (power factor, reflection) used by the moment identities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .core import (
    DomainError,
    Params,
    Scalar,
    as_scalar,
    gamma_real,
    is_exact,
    support_endpoint,
)
from .slater import build_symbol

__all__ = [
    "BetaFactor",
    "MellinFactorization",
    "MeasureModel",
    "beta_moment",
    "factorize",
    "mellin_product_moments",
    "sample",
    "eta_factor",
    "reflect",
    "SAMPLE_CHUNK",
]


@dataclass(frozen=True)
class BetaFactor:
    """Modified beta distribution on [0, 1].

    With shape pair (u, v) and root index l the density is
    (l / B(u, v)) * x**(l*u - 1) * (1 - x**l)**(v - 1); equivalently the
    l-th root of a standard Beta(u, v) variate.  v = 0 encodes the point
    mass at 1 exactly.
    """

    u: float
    v: float
    l: int

    def __post_init__(self):
        if not self.u > 0.0:
            raise DomainError("beta factor needs u > 0")
        if self.v < 0.0:
            raise DomainError("beta factor needs v >= 0")
        if not (isinstance(self.l, int) and self.l >= 1):
            raise DomainError("beta factor needs integer l >= 1")


@dataclass(frozen=True)
class MellinFactorization:
    factors: tuple
    dilation: Scalar  # support endpoint c(p)
    params: Optional[Params] = None


@dataclass(frozen=True)
class MeasureModel:
    """A measure on an interval: optional atom at 0, density, exact moments.

    ``density`` is an evaluator (x, dist_to_upper) -> value on (lower, upper);
    the second argument lets quadrature supply the distance to the endpoint
    at full precision.  ``moment_fn`` returns the n-th moment, exact when the
    defining parameters are exact.
    """

    atom_at_zero: float
    density: Optional[Callable[[float, float], float]]
    upper: float
    moment_fn: Callable[[int], Scalar]
    lower: float = 0.0


# ---------------------------------------------------------------------------
# moments


def beta_moment(factor: BetaFactor, n: int) -> float:
    """n-th moment Gamma(u+n/l) Gamma(u+v) / (Gamma(u+v+n/l) Gamma(u))."""
    if n < 0:
        raise DomainError("moment order must be nonnegative")
    if n == 0 or factor.v == 0.0:
        return 1.0
    u, v, l = factor.u, factor.v, factor.l
    return (
        gamma_real(u + n / l)
        * gamma_real(u + v)
        / (gamma_real(u + v + n / l) * gamma_real(u))
    )


def factorize(params: Params) -> MellinFactorization:
    """Mellin factorization of the measure with moments C(n*p+r, n).

    Needs p = k/l > 1 and -1 < r <= p-1.  Factor j is the modified beta
    with shape pair (u, v) = (beta_j, alpha~_j - beta_j); the reindexing
    guarantees v >= 0 on the stated region.  The product is finished by a
    dilation to [0, c(p)].
    """
    sym = build_symbol(params)
    factors = []
    for at, b in zip(sym.alphas_tilde, sym.betas):
        v = at - b
        if is_exact(v):
            vf = float(v)
        else:
            vf = 0.0 if abs(v) < 1e-12 else float(v)
        factors.append(BetaFactor(u=float(b), v=vf, l=sym.l))
    return MellinFactorization(
        factors=tuple(factors),
        dilation=support_endpoint(params.p),
        params=params,
    )


def mellin_product_moments(f: MellinFactorization, n: int) -> float:
    """Moment of the dilated product: prod_j beta_moment(f_j, n) * c**n."""
    if n < 0:
        raise DomainError("moment order must be nonnegative")
    acc = float(f.dilation) ** n
    for factor in f.factors:
        acc *= beta_moment(factor, n)
    return acc


# ---------------------------------------------------------------------------
# sampling

#: samples are generated in fixed-size chunks; chunk i of a run with seed s
#: uses the substream SeedSequence((s, i)), so workers assigned whole chunks
#: reproduce the serial output exactly when concatenated in chunk order
SAMPLE_CHUNK = 1 << 16


def sample(f: MellinFactorization, count: int, seed: int) -> np.ndarray:
    """Draw ``count`` i.i.d. samples of the dilated factor product.

    Each factor with v > 0 contributes the l-th root of a Beta(u, v) draw;
    v = 0 factors contribute the constant 1.  Deterministic under a fixed
    (seed, count) pair; see SAMPLE_CHUNK for the splitting scheme.
    """
    if count < 1:
        raise DomainError("need count >= 1")
    out = np.empty(count)
    pos = 0
    chunk_index = 0
    scale = float(f.dilation)
    while pos < count:
        m = min(SAMPLE_CHUNK, count - pos)
        rng = np.random.default_rng(np.random.SeedSequence((seed, chunk_index)))
        prod = np.full(m, scale)
        for factor in f.factors:
            if factor.v == 0.0:
                continue
            draws = rng.beta(factor.u, factor.v, size=m)
            if factor.l == 1:
                prod *= draws
            else:
                prod *= draws ** (1.0 / factor.l)
        out[pos : pos + m] = prod
        pos += m
        chunk_index += 1
    return out


# ---------------------------------------------------------------------------
# measure algebra


def eta_factor(c: Scalar) -> MeasureModel:
    """The power-law factor on [0, 1] with density c*x**(c-1), moments c/(n+c)."""
    c = as_scalar(c)
    if not c > 0:
        raise DomainError("power factor needs c > 0")
    cf = float(c)

    def density(x: float, dist_upper: float) -> float:
        if not (x > 0.0 and dist_upper > 0.0):
            raise DomainError("density defined on (0, 1)")
        return cf * x ** (cf - 1.0)

    def moment(n: int) -> Scalar:
        if n < 0:
            raise DomainError("moment order must be nonnegative")
        if is_exact(c):
            return Fraction(c) / (Fraction(c) + n)
        return cf / (cf + n)

    return MeasureModel(atom_at_zero=0.0, density=density, upper=1.0, moment_fn=moment)


def reflect(m: MeasureModel) -> MeasureModel:
    """Pushforward under x -> -x: moment n picks up the factor (-1)^n."""
    inner = m.density

    def density(x: float, dist_upper: float) -> float:
        if inner is None:
            raise DomainError("measure has no density part")
        return inner(-x, m.upper + x)

    def moment(n: int) -> Scalar:
        base = m.moment_fn(n)
        return -base if n % 2 else base

    return MeasureModel(
        atom_at_zero=m.atom_at_zero,
        density=density if inner is not None else None,
        upper=-m.lower,
        moment_fn=moment,
        lower=-m.upper,
    )
