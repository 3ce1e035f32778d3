"""Closed-form fiber-coupling efficiency of a type-II photon-pair source.

The model treats both the pump and the fiber mode as Gaussians with the
field-amplitude 1/e convention exp(-|x|^2 / 2 r^2).  The fiber mode of
radius ``w``, imaged onto the crystal with inverse magnification ``mu``,
appears there with radius ``w * mu``.  Three dimensionless crystal
numbers feed the efficiency: the transverse walk-off per unit length of
the extraordinary pump (``m_p``) and of the extraordinary generated
field (``m``), and the transverse phase-matching wave-vector normalized
by the mean generated wave-vector (``q_over_k``).  The walk-off axis
lies in the crystal principal plane; the cone-intersection direction is
perpendicular to it, so ``q_over_k`` combines with the walk-offs in
quadrature.

Everything reduces to four dimensionless shape parameters: the mode-size
ratio ``xi = w*mu/r_p`` and three decay arguments ``sigma_c``,
``sigma_1``, ``sigma_2`` built from the crystal length over the pump
waist.  The efficiency is

    eta = 4 (1+xi^2)/(2+xi^2)^2 * erf(sigma_c)/sigma_c
          * sqrt(sigma_1/erf(sigma_1) * sigma_2/erf(sigma_2))

All lengths are micrometres.  All functions are pure; the dataclasses
are frozen and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, NoRealImageError

TWO_OVER_SQRT_PI = 1.1283791670955126  # 2/sqrt(pi)

_SQRT8 = 2.0 * math.sqrt(2.0)

# Below this sigma the erf(sigma)/sigma ratio switches to its Taylor series.
EROS_SERIES_CUTOFF = 1e-4


# ---------------------------------------------------------------------------
# error function: Maclaurin series for small arguments, Lentz-evaluated
# continued fraction for the complement at large arguments
# ---------------------------------------------------------------------------

def _erf_maclaurin(x: float) -> float:
    # erf(x) = 2/sqrt(pi) * sum_n (-1)^n x^(2n+1) / (n! (2n+1))
    x2 = x * x
    term = x
    total = x
    n = 0
    while True:
        n += 1
        term *= -x2 / n
        contrib = term / (2 * n + 1)
        total += contrib
        if abs(contrib) <= 1e-17 * abs(total) or n > 200:
            return TWO_OVER_SQRT_PI * total


def _erfc_cf(x: float) -> float:
    # erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + (2/2)/(x + ...)))
    # evaluated with the modified Lentz algorithm; converges fast for x >= 2.
    tiny = 1e-300
    f = x
    c = f
    d = 0.0
    for n in range(1, 400):
        a = 0.5 * n
        d = x + a * d
        if d == 0.0:
            d = tiny
        c = x + a / c
        if c == 0.0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-17:
            break
    return math.exp(-x * x) / math.sqrt(math.pi) / f


def erf(x: float) -> float:
    """Error function with absolute error below 1e-13 on [-6, 6].

    Series/continued-fraction hybrid: Maclaurin series up to |x| = 2.5,
    complement via continued fraction beyond.
    """
    if math.isnan(x):
        raise DomainError("erf argument is NaN")
    if x < 0.0:
        return -erf(-x)
    if math.isinf(x):
        return 1.0
    if x < 2.5:
        return _erf_maclaurin(x)
    return 1.0 - _erfc_cf(x)


def erf_over_sigma(sigma: float) -> float:
    """erf(sigma)/sigma, continued through sigma = 0 by its Taylor series.

    Returns 2/sqrt(pi) at sigma = 0 and decays monotonically to 0.
    """
    if math.isnan(sigma) or sigma < 0.0:
        raise DomainError(f"sigma must be >= 0, got {sigma}")
    if sigma < EROS_SERIES_CUTOFF:
        s2 = sigma * sigma
        return TWO_OVER_SQRT_PI * (1.0 - s2 / 3.0 + s2 * s2 / 10.0)
    return erf(sigma) / sigma


def sigma_over_erf(sigma: float) -> float:
    """sigma/erf(sigma), the reciprocal of :func:`erf_over_sigma`."""
    return 1.0 / erf_over_sigma(sigma)


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if math.isnan(value) or math.isinf(value):
        raise DomainError(f"{name} must be finite, got {value}")
    return value


@dataclass(frozen=True)
class WalkOffSet:
    """Dimensionless transverse-drift numbers of the crystal geometry.

    m_p: walk-off magnitude of the extraordinary pump, displacement per
        unit propagation length.
    m: walk-off magnitude of the extraordinary generated field.
    q_over_k: transverse phase-matching wave-vector over the mean
        generated wave-vector (sine of the internal cone angle).
    All three are >= 0 and < 1 (paraxial regime).
    """

    m_p: float
    m: float
    q_over_k: float

    def __post_init__(self):
        for name in ("m_p", "m", "q_over_k"):
            v = _require_finite(name, getattr(self, name))
            if not 0.0 <= v < 1.0:
                raise DomainError(f"{name} must be in [0, 1), got {v}")


@dataclass(frozen=True)
class AlphaBeta:
    """Quadratic walk-off combinations fixed by the crystal alone."""

    alpha1: float
    alpha2: float
    beta: float

    def __post_init__(self):
        for name in ("alpha1", "alpha2", "beta"):
            v = _require_finite(name, getattr(self, name))
            if v < 0.0:
                raise DomainError(f"{name} must be >= 0, got {v}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything the closed-form efficiency needs.

    Lengths in micrometres; pump waist and fiber mode radius use the
    field-amplitude 1/e convention exp(-|x|^2 / 2 r^2).
    """

    crystal_length: float     # L, um
    pump_waist: float         # r_p, um
    fiber_mode_radius: float  # w, um
    inverse_magnification: float  # mu
    walkoffs: WalkOffSet

    def __post_init__(self):
        for name in ("crystal_length", "pump_waist", "fiber_mode_radius",
                     "inverse_magnification"):
            v = _require_finite(name, getattr(self, name))
            if v <= 0.0:
                raise DomainError(f"{name} must be > 0, got {v}")
        if not isinstance(self.walkoffs, WalkOffSet):
            raise DomainError("walkoffs must be a WalkOffSet")


@dataclass(frozen=True)
class ShapeParams:
    """Dimensionless arguments of the closed-form efficiency."""

    xi: float
    sigma_c: float
    sigma1: float
    sigma2: float
    alpha_beta: AlphaBeta

    def __post_init__(self):
        xi = _require_finite("xi", self.xi)
        if xi <= 0.0:
            raise DomainError(f"xi must be > 0, got {xi}")
        for name in ("sigma_c", "sigma1", "sigma2"):
            v = _require_finite(name, getattr(self, name))
            if v < 0.0:
                raise DomainError(f"{name} must be >= 0, got {v}")


@dataclass(frozen=True)
class EfficiencyResult:
    """Coupling efficiency together with the shape parameters behind it."""

    eta: float
    shape: ShapeParams

    def __post_init__(self):
        eta = _require_finite("eta", self.eta)
        if not 0.0 < eta <= 1.0:
            raise DomainError(f"eta must be in (0, 1], got {eta}")


# ---------------------------------------------------------------------------
# parameter algebra
# ---------------------------------------------------------------------------

def compute_alpha_beta(walkoffs: WalkOffSet) -> AlphaBeta:
    """Combine walk-off magnitudes into the alpha/beta crystal numbers.

    The pump and generated-field walk-offs are collinear, so they
    subtract directly; the phase-matching term is perpendicular and adds
    in quadrature:

        alpha1 = m_p^2 + q^2
        alpha2 = (m_p - m)^2 + q^2
        beta   = m^2 + 4 q^2
    """
    q2 = walkoffs.q_over_k ** 2
    return AlphaBeta(
        alpha1=walkoffs.m_p ** 2 + q2,
        alpha2=(walkoffs.m_p - walkoffs.m) ** 2 + q2,
        beta=walkoffs.m ** 2 + 4.0 * q2,
    )


def mode_field_radius(mfd: float) -> float:
    """Gaussian field radius of a fiber mode from its mode-field diameter.

    The MFD is the 1/e^2 intensity diameter; with the field convention
    exp(-x^2 / 2 w^2) used here that makes w = MFD / (2 sqrt(2)).
    """
    mfd = _require_finite("mfd", mfd)
    if mfd <= 0.0:
        raise DomainError(f"mfd must be > 0, got {mfd}")
    return mfd / _SQRT8


def pump_waist_from_diameter(d: float) -> float:
    """Pump waist r_p from a 1/e^2 intensity beam diameter, d / (2 sqrt(2))."""
    d = _require_finite("d", d)
    if d <= 0.0:
        raise DomainError(f"beam diameter must be > 0, got {d}")
    return d / _SQRT8


def magnification(f: float, d_bl: float) -> tuple[float, float]:
    """Inverse magnification and image distance of a thin imaging lens.

    f: focal length; d_bl: object distance (crystal face to lens).  Both
    in the same unit; returns (mu, d_al) with d_al in that unit.
    Requires d_bl > f so a real image forms.
    """
    f = _require_finite("f", f)
    d_bl = _require_finite("d_bl", d_bl)
    if f <= 0.0:
        raise DomainError(f"focal length must be > 0, got {f}")
    if d_bl <= f:
        raise NoRealImageError(
            f"object distance {d_bl} must exceed focal length {f}")
    mu = d_bl / f - 1.0
    d_al = 1.0 / (1.0 / f - 1.0 / d_bl)
    return mu, d_al


def shape_params(cfg: ExperimentConfig) -> ShapeParams:
    """Reduce an experiment configuration to its dimensionless shape."""
    ab = compute_alpha_beta(cfg.walkoffs)
    ratio = cfg.crystal_length / cfg.pump_waist
    xi = cfg.fiber_mode_radius * cfg.inverse_magnification / cfg.pump_waist
    xi2 = xi * xi
    return ShapeParams(
        xi=xi,
        sigma_c=ratio * math.sqrt(
            ((ab.alpha1 + ab.alpha2) * xi2 + ab.beta) / (xi2 * (2.0 + xi2))),
        sigma1=ratio * math.sqrt(ab.alpha1 / (1.0 + xi2)),
        sigma2=ratio * math.sqrt(ab.alpha2 / (1.0 + xi2)),
        alpha_beta=ab,
    )


def eta_closed_form(sp: ShapeParams) -> EfficiencyResult:
    """Closed-form coupling efficiency from the shape parameters.

    The sigma -> 0 limits are taken through the series form of
    erf(sigma)/sigma, so the result stays finite down to zero crystal
    length, where it equals the pure mode-matching prefactor
    4 (1+xi^2)/(2+xi^2)^2.
    """
    xi2 = sp.xi * sp.xi
    prefactor = 4.0 * (1.0 + xi2) / (2.0 + xi2) ** 2
    arms = math.sqrt(erf_over_sigma(sp.sigma1) * erf_over_sigma(sp.sigma2))
    if arms == 0.0:
        raise DomainError(
            f"sigma1={sp.sigma1}, sigma2={sp.sigma2} too extreme to evaluate")
    eta = prefactor * erf_over_sigma(sp.sigma_c) / arms
    return EfficiencyResult(eta=eta, shape=sp)


def efficiency(cfg: ExperimentConfig) -> EfficiencyResult:
    """Convenience wrapper: shape_params followed by eta_closed_form."""
    return eta_closed_form(shape_params(cfg))


# ---------------------------------------------------------------------------
# experimental bookkeeping
# ---------------------------------------------------------------------------

def _check_unit_interval(name: str, value: float) -> float:
    value = _require_finite(name, value)
    if not 0.0 < value <= 1.0:
        raise DomainError(f"{name} must be in (0, 1], got {value}")
    return value


def effective_to_raw(eta_fc: float, eta_det: float, t_filter: float) -> float:
    """Raw measured coincidence efficiency from the effective coupling.

    Multiplies the fiber-coupling efficiency by the detector efficiency
    and the filter transmittance.
    """
    eta_fc = _check_unit_interval("eta_fc", eta_fc)
    eta_det = _check_unit_interval("eta_det", eta_det)
    t_filter = _check_unit_interval("t_filter", t_filter)
    return eta_fc * eta_det * t_filter


def raw_to_effective(eta_raw: float, eta_det: float, t_filter: float) -> float:
    """Effective coupling implied by a raw coincidence efficiency.

    Inverse of :func:`effective_to_raw`; raises if the implied coupling
    exceeds 1 (inconsistent bookkeeping).
    """
    eta_raw = _check_unit_interval("eta_raw", eta_raw)
    eta_det = _check_unit_interval("eta_det", eta_det)
    t_filter = _check_unit_interval("t_filter", t_filter)
    eta_fc = eta_raw / (eta_det * t_filter)
    if eta_fc > 1.0:
        raise DomainError(
            f"implied coupling efficiency {eta_fc} exceeds 1; "
            "raw value inconsistent with the loss chain")
    return eta_fc
