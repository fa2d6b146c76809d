"""Moment certification and positive-definiteness probes.

Three layers of evidence about a parameter pair: quadrature showing that
the computed density reproduces the exact moment sequence, Hankel matrix
eigenvalue probes on moment vectors, and a budgeted search for negativity
certificates outside the positive-definite region.  The quadrature types
live in :mod:`binomoment.quadrature` and are re-exported here.
"""
from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .closedform import measure_model
from .core import DomainError, Params, RegionError, classify_binomial, gen_binomial
from .freeconv import MomentVector
from .mellin import MeasureModel
from .quadrature import IntegralResult, QuadratureMethod, QuadratureSpec, integrate
from .slater import build_slater_expansion, eval_density

__all__ = [
    "QuadratureMethod",
    "QuadratureSpec",
    "IntegralResult",
    "Witness",
    "InconclusiveWitnessError",
    "WITNESS_TOL",
    "CERTIFY_REL_TOL",
    "integrate_density",
    "certify_measure",
    "hankel_matrix_min_eig",
    "scan_for_witness",
    "find_negativity_witness",
]

#: Negativity must clear this margin before it counts as a certificate.
WITNESS_TOL = 1e-9

#: Per-moment certification tolerance, relative to max(1, |moment|).
CERTIFY_REL_TOL = 1e-7

WITNESS_KINDS = ("NegativeDensityPoint", "NegativeEvenMoment", "NegativeHankel")


class InconclusiveWitnessError(RuntimeError):
    """The witness search exhausted its budget without a certificate."""


@dataclass(frozen=True)
class Witness:
    """Numerical certificate that a moment sequence is not positive definite.

    ``location`` is an abscissa for the density kind and an index (moment
    order or Hankel size) for the other two.  ``value`` is the offending
    quantity and must be negative beyond WITNESS_TOL.
    """

    kind: str
    location: Union[float, int]
    value: float

    def __post_init__(self):
        if self.kind not in WITNESS_KINDS:
            raise DomainError(f"unknown witness kind: {self.kind!r}")
        if not self.value < -WITNESS_TOL:
            raise DomainError("witness value must be negative beyond tolerance")


def integrate_density(m: MeasureModel, n: int, spec: QuadratureSpec) -> IntegralResult:
    """Quadrature of x^n against the density part of a measure model.

    The atom never contributes here.  The double-exponential transform
    hands the integrand exact distances to both endpoints, which the
    density evaluators need to resolve the inverse-square-root edge and
    the algebraic behavior at zero.
    """
    if n < 0:
        raise DomainError("moment order must be nonnegative")
    if m.density is None:
        raise DomainError("measure has no density part")

    def f(x: float, dist_left: float, dist_right: float) -> float:
        return x**n * m.density(x, dist_right)

    return integrate(f, m.lower, m.upper, spec)


class _CachedDensity:
    """Memoizes density values; quadrature nodes repeat across moments."""

    def __init__(self, density):
        self._density = density
        self._cache = {}

    def __call__(self, x: float, dist_upper: float) -> float:
        key = (x, dist_upper)
        v = self._cache.get(key)
        if v is None:
            v = self._density(x, dist_upper)
            self._cache[key] = v
        return v


def _worker_count(n_tasks: int) -> int:
    # BINOMOMENT_THREADS caps the pool; unparseable values are ignored
    limit = os.cpu_count() or 1
    env = os.environ.get("BINOMOMENT_THREADS")
    if env:
        try:
            limit = min(limit, max(1, int(env)))
        except ValueError:
            pass
    return max(1, min(n_tasks, limit))


def _scalar_str(x) -> str:
    return str(x)


def certify_measure(
    params: Params, n_max: int, spec: Optional[QuadratureSpec] = None
) -> dict:
    """Check that the computed measure reproduces its exact moments.

    For every n <= n_max the quadrature of x^n against the density, plus
    the atom contribution at n = 0, must match C(n*p + r, n) within
    CERTIFY_REL_TOL relative to max(1, |moment|).  Needs rational p > 1
    inside the positive-definite region.

    Returns a JSON-ready report with one row per moment.  The moment loop
    runs on a thread pool capped by BINOMOMENT_THREADS with a density
    cache shared across moments, so each abscissa is evaluated once; the
    summation order inside the quadrature is fixed, which makes the
    report identical for every worker count.

    Without an explicit ``spec`` the quadrature target for each moment is
    scaled to its magnitude, keeping the absolute stopping rule aligned
    with the relative acceptance threshold as the moments grow.
    """
    if n_max < 0:
        raise DomainError("n_max must be nonnegative")
    model = measure_model(params)
    probe = MeasureModel(
        atom_at_zero=model.atom_at_zero,
        density=_CachedDensity(model.density),
        upper=model.upper,
        moment_fn=model.moment_fn,
        lower=model.lower,
    )
    t0 = time.perf_counter()

    def one(n: int) -> dict:
        exact = gen_binomial(params.p, params.r, n)
        target = float(exact)
        qspec = spec or QuadratureSpec(
            target_abs_tol=max(1e-11, 1e-9 * abs(target)), max_levels=9
        )
        res = integrate_density(probe, n, qspec)
        atom_part = model.atom_at_zero if n == 0 else 0.0
        err = abs(res.value + atom_part - target)
        tol = CERTIFY_REL_TOL * max(1.0, abs(target))
        return {
            "n": n,
            "expected": target,
            "quadrature": res.value,
            "atom": atom_part,
            "abs_error": err,
            "tolerance": tol,
            "error_estimate": res.error_estimate,
            "converged": res.converged,
            "pass": bool(err <= tol),
        }

    ns = range(n_max + 1)
    workers = _worker_count(n_max + 1)
    if workers == 1:
        rows = [one(n) for n in ns]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, ns))

    return {
        "params": {"p": _scalar_str(params.p), "r": _scalar_str(params.r)},
        "n_max": n_max,
        "atom_at_zero": model.atom_at_zero,
        "support_upper": model.upper,
        "moments": rows,
        "passed": all(row["pass"] for row in rows),
        "max_abs_error": max(row["abs_error"] for row in rows),
        "runtime_seconds": time.perf_counter() - t0,
    }


def hankel_matrix_min_eig(moments: MomentVector, d: int) -> float:
    """Smallest eigenvalue of the (d+1)x(d+1) Hankel matrix (m_{i+j})."""
    if d < 0:
        raise DomainError("Hankel size must be nonnegative")
    if 2 * d > moments.order:
        raise DomainError("need moments up to order 2d")
    mat = np.array(
        [[float(moments[i + j]) for j in range(d + 1)] for i in range(d + 1)]
    )
    return float(np.linalg.eigvalsh(mat)[0])


_SCAN_DECADES = 12
_SCAN_HANKEL_MAX = 6


def scan_for_witness(params: Params) -> Optional[Witness]:
    """Fixed-budget negativity scan with no region gating.

    Looks for the first certificate in scan order: a density value on the
    log grid c*10^-j for j = 1..12, then a negative even moment, then a
    negative minimal Hankel eigenvalue at sizes d <= 6.  None means the
    budget ran out and proves nothing.
    """
    expansion = build_slater_expansion(params)
    c = expansion.domain_upper
    for j in range(1, _SCAN_DECADES + 1):
        x = c * 10.0 ** (-j)
        v = eval_density(expansion, x)
        if v < -WITNESS_TOL:
            return Witness("NegativeDensityPoint", x, v)
    order = 2 * _SCAN_HANKEL_MAX
    moments = MomentVector(
        tuple(gen_binomial(params.p, params.r, n) for n in range(order + 1))
    )
    for n in range(2, order + 1, 2):
        v = float(moments[n])
        if v < -WITNESS_TOL:
            return Witness("NegativeEvenMoment", n, v)
    for d in range(1, _SCAN_HANKEL_MAX + 1):
        eig = hankel_matrix_min_eig(moments, d)
        if eig < -WITNESS_TOL:
            return Witness("NegativeHankel", d, eig)
    return None


def find_negativity_witness(params: Params) -> Witness:
    """Certificate that the binomial sequence at (p, r) is not positive definite.

    Only meaningful outside the positive-definite region, and needs a
    rational p > 1 so the density expansion exists.  A scan that comes up
    empty raises InconclusiveWitnessError; it is never reported as
    positive-definiteness.
    """
    if classify_binomial(params.p, params.r).positive_definite:
        raise RegionError("parameters lie inside the positive-definite region")
    if not params.k > params.l >= 1:
        raise DomainError("witness search needs rational p = k/l > 1")
    found = scan_for_witness(params)
    if found is None:
        raise InconclusiveWitnessError(
            f"no negativity certificate within the scan budget at {params}"
        )
    return found
