"""Haar-moment formulas, the cost-deviation bound, and Monte-Carlo oracles.

For a pure input state and an observable H on a d-dimensional space, the
first two Haar moments of f = Tr[U rho U^dag H] are

    E[f]   = Tr[H] / d                                   (1-design)
    E[f^2] = (Tr[H]^2 + Tr[H^2]) / (d^2 - 1) * (1 - 1/d)  (2-design)

and the variance in expanded form is

    Var[f] = (1-d)/(d^2 (d^2-1)) Tr[H]^2 + (d-1)/(d (d^2-1)) Tr[H^2].

The deviation bound is |C - E[C]| <= delta + |C| with

    delta = (d-1)/(d^2 (d^2-1)) * (|Tr[H]^2| + d |Tr[H^2]|);

a looser variant with a (d+1) numerator can be selected via ``loose=True``.
The Monte-Carlo helpers estimate the same moments by sampling Haar-random
unitaries (Ginibre + QR with phase correction) and serve as independent
oracles for the closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .simulator import Observable, expectation_batch, trace, trace_sq

HAAR_MC_MAX_DIM = 64


@dataclass(frozen=True)
class HaarMoments:
    d: int
    mean_f: float
    second_moment_f: float
    variance_f: float


@dataclass(frozen=True)
class DeviationBound:
    """Observable-dependent constant delta; bound(C) = delta + |C|."""

    delta: float

    def bound(self, cost_value: float) -> float:
        return self.delta + abs(cost_value)


def haar_mean(obs: Observable, d: int) -> float:
    """First Haar moment Tr[H]/d."""
    return trace(obs, d) / d


def haar_second_moment(obs: Observable, d: int) -> float:
    """Second Haar moment for pure input states."""
    tr = trace(obs, d)
    tr2 = trace_sq(obs, d)
    return (tr * tr + tr2) / (d * d - 1.0) * (1.0 - 1.0 / d)


def haar_variance(obs: Observable, d: int) -> float:
    """Haar variance of f in its expanded closed form."""
    tr = trace(obs, d)
    tr2 = trace_sq(obs, d)
    dd = float(d)
    return (1.0 - dd) / (dd * dd * (dd * dd - 1.0)) * tr * tr + (
        dd - 1.0
    ) / (dd * (dd * dd - 1.0)) * tr2


def haar_moments(obs: Observable, d: int) -> HaarMoments:
    return HaarMoments(
        d=d,
        mean_f=haar_mean(obs, d),
        second_moment_f=haar_second_moment(obs, d),
        variance_f=haar_variance(obs, d),
    )


def deviation_delta(obs: Observable, d: int, loose: bool = False) -> float:
    """Constant term of the deviation bound.

    The default (d-1) numerator is the one the variance calculation actually
    yields; ``loose=True`` selects the (d+1) variant, which is weaker.
    """
    tr = trace(obs, d)
    tr2 = trace_sq(obs, d)
    num = float(d + 1 if loose else d - 1)
    return num / (d * d * (d * d - 1.0)) * (abs(tr * tr) + d * abs(tr2))


def deviation_bound(
    obs: Observable, d: int, cost_value: float, loose: bool = False
) -> float:
    """Upper bound on |C - E[C]|: delta + |cost_value|."""
    return DeviationBound(deviation_delta(obs, d, loose)).bound(cost_value)


def theorem1_lower_bound(dataset, obs: Observable, d: int) -> float:
    """Lower bound on the ensemble-average cost: the mean per-sample Haar
    variance, which is input-independent for pure encoded states."""
    if len(dataset) == 0:
        raise ValueError("dataset is empty")
    return haar_variance(obs, d)


# ---------------------------------------------------------------------------
# Monte-Carlo oracles

def sample_haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """One Haar-distributed d x d unitary: QR of a complex Gaussian matrix,
    with the R diagonal's phases folded into Q."""
    if d > HAAR_MC_MAX_DIM:
        raise ValueError(f"haar sampling capped at d={HAAR_MC_MAX_DIM}, got {d}")
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def _haar_state_batch(d: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """First columns (U|0>) of ``count`` Haar unitaries, shape (count, d)."""
    z = (
        rng.standard_normal((count, d, d)) + 1j * rng.standard_normal((count, d, d))
    ) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    return q[:, :, 0] * (diag[:, 0] / np.abs(diag[:, 0]))[:, None]


@dataclass(frozen=True)
class MomentEstimate:
    mean: float
    variance: float
    se_mean: float
    se_var: float
    num_samples: int


def monte_carlo_moments(
    obs: Observable,
    d: int,
    num_samples: int,
    seed: int | np.random.SeedSequence = 0,
    num_streams: int = 1,
    batch_size: int = 20_000,
) -> MomentEstimate:
    """Sample mean/variance of f over Haar draws with rho = |0><0|.

    Samples are partitioned across ``num_streams`` independent RNG streams
    (seeds spawned from the master seed) and pooled, so the estimate is
    deterministic given (seed, num_streams).  Standard errors come from the
    usual asymptotics: se_mean = s/sqrt(n), se_var = sqrt((m4 - s^4)/n).
    """
    if d > HAAR_MC_MAX_DIM:
        raise ValueError(f"haar sampling capped at d={HAAR_MC_MAX_DIM}, got {d}")
    if num_samples < 2:
        raise ValueError(f"need at least 2 samples, got {num_samples}")
    if num_streams < 1:
        raise ValueError("num_streams must be >= 1")
    n = int(np.log2(d))
    if 1 << n != d:
        raise ValueError(f"d must be a power of two, got {d}")

    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    counts = [num_samples // num_streams] * num_streams
    counts[-1] += num_samples - sum(counts)
    values = []
    for child, count in zip(ss.spawn(num_streams), counts):
        rng = np.random.default_rng(child)
        done = 0
        while done < count:
            chunk = min(batch_size, count - done)
            states = _haar_state_batch(d, chunk, rng)
            values.append(np.asarray(expectation_batch(states, n, obs), dtype=np.float64))
            done += chunk
    f = np.concatenate(values)

    mean = float(np.mean(f))
    var = float(np.var(f, ddof=1))
    centered = f - mean
    m4 = float(np.mean(centered**4))
    se_mean = float(np.sqrt(var / num_samples))
    se_var = float(np.sqrt(max(m4 - var * var, 0.0) / num_samples))
    return MomentEstimate(
        mean=mean, variance=var, se_mean=se_mean, se_var=se_var,
        num_samples=num_samples,
    )


def moment_report(
    obs: Observable, d: int, num_samples: int, seed: int = 0, num_streams: int = 1
) -> dict:
    """Side-by-side analytic and Monte-Carlo moments, JSON-ready."""
    analytic = haar_moments(obs, d)
    mc = monte_carlo_moments(obs, d, num_samples, seed, num_streams)
    return {
        "d": d,
        "observable": obs.name,
        "analytic": {
            "mean": analytic.mean_f,
            "second": analytic.second_moment_f,
            "var": analytic.variance_f,
        },
        "mc": {
            "mean": mc.mean,
            "var": mc.variance,
            "se_mean": mc.se_mean,
            "se_var": mc.se_var,
            "n": mc.num_samples,
        },
    }
