"""Revealing probabilities and the two worst-case privacy measures.

The posterior ("revealing") probability of a true value given an observed
randomized response is what an interviewer could infer. Two scalar measures
summarize the exposure:

* alpha — the largest absolute gap between prior and posterior over all
  (true value, response) pairs. Smaller is more private; relevant when every
  support value is stigmatizing.
* beta — the smallest posterior probability, over responses, of belonging to
  the non-stigmatizing class. Larger is more private; relevant when some
  values carry no stigma.

Both depend on the unknown population, so design works with guaranteed
bounds: the worst case of each measure over all populations the device
parameter admits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    Device,
    PolicyMode,
    PopulationModel,
    PrivacyPolicy,
    ValidationError,
    _require_same_m,
)

# relative slack when collecting tied argmax/argmin indices
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class AlphaResult:
    """Worst-case prior/posterior gap, every (i, j) pair attaining it, and the full gap matrix."""

    alpha: float
    argmax: tuple[tuple[int, int], ...]
    gaps: np.ndarray


@dataclass(frozen=True)
class BetaResult:
    """Minimum posterior non-stigmatizing mass, the responses attaining it, and the mass per response."""

    beta: float
    argmin: tuple[int, ...]
    mass_by_response: np.ndarray


def revealing_probabilities(device: Device, population: PopulationModel) -> np.ndarray:
    """Posterior matrix: entry [i, j] is Prob(X = x_i | R = x_j).

    Closed form (p*delta_ij + (1-p)/m) * pi_i / (p*pi_j + (1-p)/m); the
    denominator is bounded below by (1-p)/m > 0, so every response value is
    possible and each column is a proper distribution.
    """
    _require_same_m(device.m, population.m)
    p, q = device.p, device.forced_share
    pi = population.pi_array
    numer = q * pi[:, None] + np.diag(p * pi)
    lam = p * pi + q
    return numer / lam[None, :]


def alpha_measure(device: Device, population: PopulationModel) -> AlphaResult:
    """Worst-case absolute prior/posterior gap over all (true value, response) pairs."""
    posterior = revealing_probabilities(device, population)
    gaps = np.abs(posterior - population.pi_array[:, None])
    alpha = float(gaps.max())

    # the maximum gap is always attained on the diagonal; cross-check the
    # full-matrix max against that reduced form before reporting
    pi = population.pi_array
    reduced = float(np.max(pi * (1.0 - pi) / (pi + device.forced_share / device.p)))
    if abs(alpha - reduced) > 1e-12 + 1e-9 * alpha:
        raise RuntimeError(
            f"alpha self-check failed: matrix max {alpha!r} vs diagonal form {reduced!r}"
        )

    threshold = alpha - TIE_RTOL * alpha
    argmax = tuple(
        (int(i), int(j)) for i, j in np.argwhere(gaps >= threshold)
    )
    gaps = gaps.copy()
    gaps.flags.writeable = False
    return AlphaResult(alpha=alpha, argmax=argmax, gaps=gaps)


def beta_measure(
    device: Device, population: PopulationModel, nonstigmatizing: tuple[int, ...]
) -> BetaResult:
    """Minimum over responses of the posterior mass on the non-stigmatizing values."""
    indices = tuple(sorted(set(int(i) for i in nonstigmatizing)))
    if not indices:
        raise ValidationError("BAD_NONSTIG_SET", "non-stigmatizing index set is empty")
    if any(i < 0 or i >= device.m for i in indices):
        raise ValidationError("BAD_NONSTIG_SET", f"indices {indices} out of range for m={device.m}")
    if len(indices) >= device.m:
        raise ValidationError(
            "BAD_NONSTIG_SET", "every value is non-stigmatizing; beta is undefined"
        )
    posterior = revealing_probabilities(device, population)
    mass = posterior[list(indices), :].sum(axis=0)
    beta = float(mass.min())
    threshold = beta + TIE_RTOL * max(beta, 1.0)
    argmin = tuple(int(j) for j in np.flatnonzero(mass <= threshold))
    mass = mass.copy()
    mass.flags.writeable = False
    return BetaResult(beta=beta, argmin=argmin, mass_by_response=mass)


def guaranteed_alpha_bound(device: Device) -> float:
    """Smallest threshold xi* such that alpha <= xi* for every population.

    With k = 4(1-p)/(mp), xi* is the root in (0, 1) of (1-xi)^2 = k*xi,
    evaluated in the cancellation-free form 2 / (2 + k + sqrt((2+k)^2 - 4)).
    """
    k = 4.0 * (1.0 - device.p) / (device.m * device.p)
    return 2.0 / (2.0 + k + math.sqrt((2.0 + k) ** 2 - 4.0))


def guaranteed_beta_bound(device: Device, c: float) -> float:
    """Largest threshold xi* such that beta >= xi* for every population whose
    non-stigmatizing mass is at least c."""
    if not (isinstance(c, (int, float)) and 0.0 < c < 1.0):
        raise ValidationError("C_OUT_OF_RANGE", f"c must lie in (0,1), got {c!r}")
    return c / (1.0 + device.m * device.p * (1.0 - c) / (1.0 - device.p))


@dataclass(frozen=True)
class PrivacyReport:
    """Privacy diagnostics for one (device, population) pair under a given mode."""

    mode: PolicyMode
    p: float
    posterior: np.ndarray
    guaranteed_bound: float | None
    alpha: float | None = None
    alpha_argmax: tuple[tuple[int, int], ...] | None = None
    beta: float | None = None
    beta_argmin: tuple[int, ...] | None = None

    def to_json_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "p": self.p,
            "alpha": self.alpha,
            "alpha_argmax": None
            if self.alpha_argmax is None
            else [list(pair) for pair in self.alpha_argmax],
            "beta": self.beta,
            "beta_argmin": None if self.beta_argmin is None else list(self.beta_argmin),
            "posterior": [[float(v) for v in row] for row in self.posterior],
            "guaranteed_bound": self.guaranteed_bound,
        }


def privacy_report(
    device: Device,
    population: PopulationModel,
    mode: PolicyMode,
    nonstigmatizing: tuple[int, ...] | None = None,
    c: float | None = None,
) -> PrivacyReport:
    """Assemble the measure matching ``mode`` plus the posterior matrix and the
    guaranteed worst-case bound at this device parameter.

    In subset mode the bound needs the prior mass floor ``c``; without it the
    bound is reported as None.
    """
    posterior = revealing_probabilities(device, population)
    if mode is PolicyMode.ALL_STIGMATIZING:
        result = alpha_measure(device, population)
        return PrivacyReport(
            mode=mode,
            p=device.p,
            posterior=posterior,
            guaranteed_bound=guaranteed_alpha_bound(device),
            alpha=result.alpha,
            alpha_argmax=result.argmax,
        )
    if nonstigmatizing is None:
        raise ValidationError("BAD_NONSTIG_SET", "subset mode needs the non-stigmatizing indices")
    result = beta_measure(device, population, nonstigmatizing)
    bound = None if c is None else guaranteed_beta_bound(device, c)
    return PrivacyReport(
        mode=mode,
        p=device.p,
        posterior=posterior,
        guaranteed_bound=bound,
        beta=result.beta,
        beta_argmin=result.argmin,
    )


def report_for_policy(
    device: Device, population: PopulationModel, policy: PrivacyPolicy
) -> PrivacyReport:
    """Privacy report using a policy's mode, index set and mass floor."""
    return privacy_report(
        device,
        population,
        mode=policy.mode,
        nonstigmatizing=policy.nonstigmatizing,
        c=policy.c,
    )
