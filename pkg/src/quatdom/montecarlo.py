"""Monte Carlo estimates of domain volumes and integrals.

Sampling is counter based: sample ``i`` consumes the Philox stream positions
``[i * dim, (i + 1) * dim)`` for the given seed, so the sample set depends only
on ``(seed, n_samples)``.  Work is cut into fixed blocks of ``BLOCK`` samples,
per-block moments are merged in block order, and the result is bit-identical
for any number of workers.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Union

import numpy as np

from .closed_forms import (
    FormulaFamily,
    I_herm,
    J_rect,
    J_sym,
    K_anti,
    L_four,
    all_variants,
    evaluate,
)
from .domains import DomainSpec, contains_batch, domain_of, integrand_batch

BLOCK = 65536
MIN_SAMPLES = 10_000
MAX_REJECTION_DIM = 16
Z_GATE = 3.0
REL_SE_GATE = 0.05
SIG_DIGITS = 12


class DimensionTooLarge(ValueError):
    """Plain rejection sampling refused: acceptance would be too small."""


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    std_error: float
    n_samples: int
    n_accepted: int
    seed: int
    wall_time: float
    workers: int = 1


@dataclass(frozen=True)
class VariantComparison:
    source: str
    exact: str
    value: float
    z_score: float
    ratio: float


@dataclass(frozen=True)
class VerificationReport:
    family: str
    params: dict
    closed_form: str
    closed_form_value: float
    closed_form_source: str
    estimate: MCEstimate
    z_score: float
    ratio: float
    verdict: str
    variants: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        return _round_floats(d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _round_floats(obj):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return float(f"{obj:.{SIG_DIGITS}g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


# sampling ------------------------------------------------------------------


def block_uniforms(seed: int, start: int, count: int, dim: int) -> np.ndarray:
    """Uniforms on [0, 1) for samples ``start .. start+count-1``."""
    if (start * dim) % 4:
        raise ValueError("block start must land on a Philox counter boundary")
    bitgen = np.random.Philox(key=seed)
    bitgen.advance(start * dim // 4)
    return np.random.Generator(bitgen).random((count, dim))


def _block_values(mode: str, target, seed: int, start: int, count: int):
    """(values, accepted) for one block."""
    if mode == "volume":
        spec = target
        x = 2.0 * block_uniforms(seed, start, count, spec.real_dim) - 1.0
        inside = contains_batch(spec, x)
        return inside.astype(float), int(np.count_nonzero(inside))
    spec = domain_of(target)
    dim = spec.real_dim
    u = block_uniforms(seed, start, count, dim)
    if mode == "bounded":
        x = 2.0 * u - 1.0
        f = integrand_batch(target, x) * spec.box_volume
        return f, int(np.count_nonzero(f))
    # shift off 0 so the tangent never hits the pole
    u = u + 2.0**-54
    x = np.tan(np.pi * (u - 0.5))
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        weight = np.pi**dim * np.prod(1.0 + x * x, axis=-1)
        f = integrand_batch(target, x) * weight
    f = np.where(np.isfinite(f), f, 0.0)
    return f, count


def _block_stats(task):
    mode, target, seed, start, count = task
    f, accepted = _block_values(mode, target, seed, start, count)
    mean = float(np.mean(f))
    m2 = float(np.sum((f - mean) ** 2))
    return count, mean, m2, accepted


def _merge(a, b):
    """Chan's pairwise update of (count, mean, M2, accepted)."""
    na, ma, sa, ka = a
    nb, mb, sb, kb = b
    n = na + nb
    delta = mb - ma
    mean = ma + delta * nb / n
    m2 = sa + sb + delta * delta * na * nb / n
    return n, mean, m2, ka + kb


def _tasks(mode, target, seed, n_samples):
    return [
        (mode, target, seed, start, min(BLOCK, n_samples - start))
        for start in range(0, n_samples, BLOCK)
    ]


def _run(mode, target, n_samples: int, seed: int, workers: int):
    n_samples = int(n_samples)
    if n_samples < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {n_samples}")
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    if workers < 1:
        raise ValueError("workers must be at least 1")
    tasks = _tasks(mode, target, seed, n_samples)
    t0 = time.perf_counter()
    if workers == 1 or len(tasks) == 1:
        stats = [_block_stats(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            stats = list(pool.map(_block_stats, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    total = stats[0]
    for s in stats[1:]:
        total = _merge(total, s)
    return total, time.perf_counter() - t0


def _check_rejection_dim(spec: DomainSpec) -> None:
    if spec.real_dim > MAX_REJECTION_DIM:
        raise DimensionTooLarge(
            f"{spec.label()} has {spec.real_dim} real coordinates; "
            f"rejection sampling is limited to {MAX_REJECTION_DIM}"
        )


def mc_volume(spec: DomainSpec, n_samples: int, seed: int, workers: int = 1) -> MCEstimate:
    """Box volume times the accepted fraction; binomial standard error."""
    _check_rejection_dim(spec)
    (n, _, _, accepted), wall = _run("volume", spec, n_samples, seed, workers)
    p = accepted / n
    vol = spec.box_volume
    return MCEstimate(
        mean=vol * p,
        std_error=vol * math.sqrt(p * (1.0 - p) / n),
        n_samples=n,
        n_accepted=accepted,
        seed=seed,
        wall_time=wall,
        workers=workers,
    )


def _estimate(total, seed, wall, workers) -> MCEstimate:
    n, mean, m2, accepted = total
    var = m2 / (n - 1)
    return MCEstimate(
        mean=mean,
        std_error=math.sqrt(var / n),
        n_samples=n,
        n_accepted=accepted,
        seed=seed,
        wall_time=wall,
        workers=workers,
    )


def mc_integral(family: FormulaFamily, n_samples: int, seed: int, workers: int = 1) -> MCEstimate:
    """Uniform sampling on the bounding box; integrand is zero outside."""
    if not family.bounded:
        raise ValueError(f"{family.tag} is over an unbounded region; use mc_integral_unbounded")
    _check_rejection_dim(domain_of(family))
    total, wall = _run("bounded", family, n_samples, seed, workers)
    return _estimate(total, seed, wall, workers)


def mc_integral_unbounded(family: FormulaFamily, n_samples: int, seed: int, workers: int = 1) -> MCEstimate:
    """Per-coordinate tangent substitution ``x = tan(pi (u - 1/2))``.

    The weight ``pi^dim prod(1 + x^2)`` times the integrand stays bounded
    whenever the exponent is in the convergent range.
    """
    if family.bounded:
        raise ValueError(f"{family.tag} is over a bounded domain; use mc_integral")
    total, wall = _run("unbounded", family, n_samples, seed, workers)
    return _estimate(total, seed, wall, workers)


# verification ----------------------------------------------------------------


def volume_family(spec: DomainSpec) -> FormulaFamily:
    """The closed-form family whose value at exponent 0 is the volume of ``spec``."""
    return {
        "RI": lambda: J_rect(spec.m, spec.n, 0),
        "RII": lambda: I_herm(spec.n, 0),
        "RIII": lambda: K_anti(spec.n, 0),
        "SYM": lambda: J_sym(spec.n, 0),
        "RIV": lambda: L_four(spec.n, 0, 0),
    }[spec.kind]()


def _z(mean, se, ref):
    if se > 0:
        return (mean - ref) / se
    return 0.0 if mean == ref else math.copysign(math.inf, mean - ref)


def classify(mean: float, std_error: float, z: float) -> str:
    if mean == 0 or std_error / abs(mean) > REL_SE_GATE:
        return "inconclusive"
    return "consistent" if abs(z) <= Z_GATE else "inconsistent"


def compare(family: FormulaFamily, est: MCEstimate, name: Optional[str] = None, params=None) -> VerificationReport:
    ref = evaluate(family)
    ref_val = ref.value.to_float()
    comps = []
    for v in all_variants(family):
        val = v.value.to_float()
        comps.append(
            VariantComparison(
                source=v.source,
                exact=str(v.value),
                value=val,
                z_score=_z(est.mean, est.std_error, val),
                ratio=est.mean / val,
            )
        )
    z = _z(est.mean, est.std_error, ref_val)
    return VerificationReport(
        family=name or family.tag,
        params=params if params is not None else family.params(),
        closed_form=str(ref.value),
        closed_form_value=ref_val,
        closed_form_source=ref.source,
        estimate=est,
        z_score=z,
        ratio=est.mean / ref_val,
        verdict=classify(est.mean, est.std_error, z),
        variants=comps,
    )


def verify(
    target: Union[FormulaFamily, DomainSpec],
    n_samples: int,
    seed: int,
    workers: int = 1,
) -> VerificationReport:
    """Run the matching estimator and compare with every closed-form variant."""
    if isinstance(target, DomainSpec):
        fam = volume_family(target)
        est = mc_volume(target, n_samples, seed, workers)
        params = {"m": target.m, "n": target.n} if target.kind == "RI" else {"n": target.n}
        return compare(fam, est, name=target.kind, params=params)
    if target.bounded:
        est = mc_integral(target, n_samples, seed, workers)
    else:
        est = mc_integral_unbounded(target, n_samples, seed, workers)
    return compare(target, est)
