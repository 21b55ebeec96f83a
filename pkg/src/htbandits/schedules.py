"""Truncation levels, confidence radii, and elimination-epoch schedules.

Every quantity here is a pure function of its arguments, computed in double
precision with natural logarithms.  Policies call these functions rather than
inlining the formulas, so tests and the privacy audit can recompute the exact
same values.
"""

import functools
import logging
import math
from dataclasses import dataclass

__all__ = [
    "MomentParams",
    "MAX_EPOCH_PULLS",
    "EpochSchedule",
    "private_ucb_truncation",
    "private_ucb_radius",
    "nonprivate_ucb_threshold",
    "nonprivate_ucb_radius",
    "central_se_schedule",
    "local_se_schedule",
]

_log = logging.getLogger(__name__)

# Epoch lengths saturate here. Below 2**50 the +1 term in the ceiling argument
# exceeds a few ulp, so the ceiling and the downstream width inequalities are
# decidable in double precision; beyond it no runnable horizon fits an epoch
# anyway.
MAX_EPOCH_PULLS = 2**50


@dataclass(frozen=True)
class MomentParams:
    """Heavy-tail moment assumption: ``E|X|**(1+v) <= u``.

    Parameters
    ----------
    u : float
        Moment bound, positive.
    v : float
        Tail exponent in (0, 1].
    """

    u: float
    v: float

    def __post_init__(self) -> None:
        if not self.u > 0.0:
            raise ValueError(f"u must be positive, got {self.u}")
        if not 0.0 < self.v <= 1.0:
            raise ValueError(f"v must lie in (0, 1], got {self.v}")


@dataclass(frozen=True)
class EpochSchedule:
    """One elimination epoch's derived quantities.

    Attributes
    ----------
    target_gap : float
        Gap scale the epoch resolves.
    pulls_per_arm : int
        Pulls of every viable arm during the epoch.
    truncation : float
        Magnitude level rewards are truncated at.
    accuracy : float
        Accuracy term; the elimination threshold is a fixed multiple of it.
    saturated : bool
        True when ``pulls_per_arm`` was clamped to :data:`MAX_EPOCH_PULLS`.
    """

    target_gap: float
    pulls_per_arm: int
    truncation: float
    accuracy: float
    saturated: bool = False


@functools.lru_cache(maxsize=None)
def _pow(base: float, exponent: float) -> float:
    return base**exponent


@functools.lru_cache(maxsize=None)
def _log_pow(x: float, exponent: float) -> float:
    return math.log(x) ** exponent


def _check_eps(eps: float) -> None:
    if not eps > 0.0:
        raise ValueError(f"eps must be positive, got {eps}")


def _check_horizon(horizon: float) -> None:
    if not horizon > 1.0:
        raise ValueError(f"horizon must exceed 1, got {horizon}")


def private_ucb_truncation(
    params: MomentParams, eps: float, horizon: int, n: int
) -> float:
    """Truncation level after ``n`` pulls of an arm, private index policy.

    ``(eps * u * n / ln(horizon)**1.5) ** (1/(1+v))``; non-decreasing in ``n``.
    """
    _check_eps(eps)
    _check_horizon(horizon)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return _pow(
        eps * params.u * n / _log_pow(horizon, 1.5), 1.0 / (1.0 + params.v)
    )


def private_ucb_radius(
    params: MomentParams, eps: float, horizon: int, n: int, t: int
) -> float:
    """One-sided confidence radius of the private truncated-mean index.

    ``18 * u**(1/(1+v)) * (ln(2*t**4) * ln(horizon)**(1.5 + 1/v)
    / (n * eps)) ** (v/(1+v))``.  The failure probability per arm and round is
    at most ``1/t**4``.
    """
    _check_eps(eps)
    _check_horizon(horizon)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    v = params.v
    w = math.log(2 * t**4) * _log_pow(horizon, 1.5 + 1.0 / v) / (n * eps)
    return 18.0 * _pow(params.u, 1.0 / (1.0 + v)) * w ** (v / (1.0 + v))


def nonprivate_ucb_threshold(params: MomentParams, n: int, t: float) -> float:
    """Truncation level of the non-private truncated-mean baseline.

    ``(u * n / ln(t**2)) ** (1/(1+v))``; requires ``t > 1``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not t > 1.0:
        raise ValueError(f"t must exceed 1, got {t}")
    return (params.u * n / math.log(t**2)) ** (1.0 / (1.0 + params.v))


def nonprivate_ucb_radius(params: MomentParams, n: int, t: float) -> float:
    """Confidence radius of the non-private truncated-mean baseline.

    Classical truncated-mean constant:
    ``4 * u**(1/(1+v)) * (ln(t**2) / n) ** (v/(1+v))``.  Used for qualitative
    comparison runs only.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not t > 1.0:
        raise ValueError(f"t must exceed 1, got {t}")
    v = params.v
    return 4.0 * _pow(params.u, 1.0 / (1.0 + v)) * (math.log(t**2) / n) ** (v / (1.0 + v))


def _check_epoch_args(beta: float, num_viable: int, epoch: int) -> None:
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    if num_viable < 1:
        raise ValueError(f"num_viable must be >= 1, got {num_viable}")
    if epoch < 1:
        raise ValueError(f"epoch must be >= 1, got {epoch}")


def _clamp_pulls(raw: float, label: str) -> tuple:
    if not math.isfinite(raw) or raw > MAX_EPOCH_PULLS:
        _log.warning(
            "%s epoch length %.3g exceeds MAX_EPOCH_PULLS=2**50; saturating",
            label,
            raw,
        )
        return MAX_EPOCH_PULLS, True
    return math.ceil(raw), False


def central_se_schedule(
    params: MomentParams, eps: float, beta: float, num_viable: int, epoch: int
) -> EpochSchedule:
    """Epoch schedule of the centrally private elimination policy.

    Epoch ``tau`` targets gap ``2**-tau``.  With
    ``L = ln(4 * num_viable * tau**2 / beta)``:

    - pulls per arm ``R = ceil(u**(1/v) * 24**((1+v)/v) * L
      / (eps * gap**((1+v)/v)) + 1)``, clamped at :data:`MAX_EPOCH_PULLS`;
    - truncation ``B = (u * R * eps / L) ** (1/(1+v))``;
    - accuracy ``err = u**(1/(1+v)) * (L / (R * eps)) ** (v/(1+v))``, which
      satisfies ``u / B**v == err`` for any ``R``.
    """
    _check_eps(eps)
    _check_epoch_args(beta, num_viable, epoch)
    u, v = params.u, params.v
    gap = 2.0 ** -epoch
    log_term = math.log(4.0 * num_viable * epoch**2 / beta)
    raw = (
        u ** (1.0 / v)
        * 24.0 ** ((1.0 + v) / v)
        * log_term
        / (eps * gap ** ((1.0 + v) / v))
        + 1.0
    )
    pulls, saturated = _clamp_pulls(raw, "central")
    truncation = (u * pulls * eps / log_term) ** (1.0 / (1.0 + v))
    accuracy = u ** (1.0 / (1.0 + v)) * (log_term / (pulls * eps)) ** (v / (1.0 + v))
    return EpochSchedule(
        target_gap=gap,
        pulls_per_arm=pulls,
        truncation=truncation,
        accuracy=accuracy,
        saturated=saturated,
    )


def local_se_schedule(
    params: MomentParams, eps: float, beta: float, num_viable: int, epoch: int
) -> EpochSchedule:
    """Epoch schedule of the locally private elimination policy.

    Epoch ``tau`` targets gap ``4**-tau``.  With
    ``L = ln(8 * num_viable * tau**2 / beta)``:

    - pulls per arm ``R = ceil(u**(2/v) * 28**(2(1+v)/v) * L
      / (eps**2 * gap**(2(1+v)/v)) + L)``, clamped at
      :data:`MAX_EPOCH_PULLS`;
    - truncation ``B = (u * sqrt(R) * eps / sqrt(L)) ** (1/(1+v))``;
    - accuracy ``err = u**(1/(1+v)) * (sqrt(L) / (R * eps)) ** (v/(1+v))``.
    """
    _check_eps(eps)
    _check_epoch_args(beta, num_viable, epoch)
    u, v = params.u, params.v
    gap = 4.0 ** -epoch
    log_term = math.log(8.0 * num_viable * epoch**2 / beta)
    raw = (
        u ** (2.0 / v)
        * 28.0 ** (2.0 * (1.0 + v) / v)
        * log_term
        / (eps**2 * gap ** (2.0 * (1.0 + v) / v))
        + log_term
    )
    pulls, saturated = _clamp_pulls(raw, "local")
    truncation = (u * math.sqrt(pulls) * eps / math.sqrt(log_term)) ** (1.0 / (1.0 + v))
    accuracy = u ** (1.0 / (1.0 + v)) * (math.sqrt(log_term) / (pulls * eps)) ** (
        v / (1.0 + v)
    )
    return EpochSchedule(
        target_gap=gap,
        pulls_per_arm=pulls,
        truncation=truncation,
        accuracy=accuracy,
        saturated=saturated,
    )
