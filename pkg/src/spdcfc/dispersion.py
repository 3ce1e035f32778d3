"""Walk-off and group-delay numbers from a uniaxial index model.

Sellmeier coefficients are data, not code: they ship in a versioned JSON
file (see ``data/bbo_sellmeier.json``) with a literature citation, and
users may point the tools at their own file.  Only negative uniaxial
(or isotropic) materials are accepted.  The supported dispersion form is

    "sellmeier-1":  n^2 = c0 + c1 / (lambda^2 - c2) - c3 * lambda^2

with the wavelength in micrometres.

The cut angle defaults to 42.9 deg for the bundled BBO data.  That value
is a package default chosen to reproduce common type-II geometries near
415 nm pumping, not a measured quantity; an auxiliary bisection solver
for the collinear degenerate phase-matching angle is provided.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .core import WalkOffSet
from .errors import DomainError, WavelengthRangeError

# Package default cut angle for the bundled BBO data (default, not a
# measured value).
DEFAULT_CUT_ANGLE_DEG = 42.9

# Central-difference step for group-index derivatives: 1 nm.
_DERIV_STEP_UM = 1e-3

_C_UM_PER_FS = 0.299792458  # speed of light


@dataclass(frozen=True)
class IndexModel:
    """Principal refractive indices of a uniaxial crystal.

    ``ordinary`` and ``extraordinary`` are sellmeier-1 coefficient lists
    [c0, c1, c2, c3]; ``range_um`` is the wavelength validity interval.
    """

    material: str
    ordinary: tuple[float, float, float, float]
    extraordinary: tuple[float, float, float, float]
    range_um: tuple[float, float]
    citation: str = ""
    form: str = "sellmeier-1"

    def __post_init__(self):
        if self.form != "sellmeier-1":
            raise DomainError(f"unsupported dispersion form {self.form!r}")
        object.__setattr__(self, "ordinary", tuple(float(c) for c in self.ordinary))
        object.__setattr__(self, "extraordinary",
                           tuple(float(c) for c in self.extraordinary))
        if len(self.ordinary) != 4 or len(self.extraordinary) != 4:
            raise DomainError("sellmeier-1 takes exactly 4 coefficients")
        lo, hi = (float(v) for v in self.range_um)
        if not 0.0 < lo < hi:
            raise DomainError(f"invalid validity range [{lo}, {hi}]")
        object.__setattr__(self, "range_um", (lo, hi))
        # n real and > 1 across the range, and n_o >= n_e (negative
        # uniaxial or isotropic; positive uniaxial is out of scope).
        for lam in [lo + (hi - lo) * k / 32.0 for k in range(33)]:
            n_o2 = _sellmeier1(self.ordinary, lam)
            n_e2 = _sellmeier1(self.extraordinary, lam)
            if n_o2 <= 1.0 or n_e2 <= 1.0:
                raise DomainError(
                    f"{self.material}: index not real and > 1 at {lam:.4f} um")
            if n_o2 < n_e2:
                raise DomainError(
                    f"{self.material}: n_o < n_e at {lam:.4f} um; "
                    "only negative uniaxial crystals are supported")


def _sellmeier1(coeffs: tuple[float, ...], lam: float) -> float:
    c0, c1, c2, c3 = coeffs
    l2 = lam * lam
    return c0 + c1 / (l2 - c2) - c3 * l2


def _check_range(model: IndexModel, lam: float) -> None:
    lo, hi = model.range_um
    if not lo <= lam <= hi:
        raise WavelengthRangeError(
            f"{lam} um outside validity range [{lo}, {hi}] of {model.material}")


def ordinary_index(model: IndexModel, lam: float) -> float:
    """Ordinary principal index n_o(lambda)."""
    _check_range(model, lam)
    return math.sqrt(_sellmeier1(model.ordinary, lam))


def principal_extraordinary_index(model: IndexModel, lam: float) -> float:
    """Extraordinary principal index n_e(lambda) at 90 deg to the axis."""
    _check_range(model, lam)
    return math.sqrt(_sellmeier1(model.extraordinary, lam))


def extraordinary_index(model: IndexModel, lam: float, theta: float) -> float:
    """Extraordinary index at angle theta between wave-vector and optic axis.

    1/n^2 = cos^2(theta)/n_o^2 + sin^2(theta)/n_e^2; equals n_o at
    theta = 0 and the principal n_e at theta = pi/2.
    """
    _check_range(model, lam)
    n_o2 = _sellmeier1(model.ordinary, lam)
    n_e2 = _sellmeier1(model.extraordinary, lam)
    c, s = math.cos(theta), math.sin(theta)
    return 1.0 / math.sqrt(c * c / n_o2 + s * s / n_e2)


def walk_off_tangent(model: IndexModel, lam: float, theta: float) -> float:
    """Magnitude of the Poynting walk-off tangent of the extraordinary ray.

    tan(rho) = (n_e(theta)^2 / 2) sin(2 theta) (1/n_e^2 - 1/n_o^2),
    returned as a magnitude; zero along and perpendicular to the axis.
    """
    _check_range(model, lam)
    n_o2 = _sellmeier1(model.ordinary, lam)
    n_e2 = _sellmeier1(model.extraordinary, lam)
    n2 = extraordinary_index(model, lam, theta) ** 2
    return abs(0.5 * n2 * math.sin(2.0 * theta) * (1.0 / n_e2 - 1.0 / n_o2))


@dataclass(frozen=True)
class PhaseMatchGeometry:
    """Wavelengths and angles of the degenerate down-conversion geometry.

    Wavelengths in micrometres, angles in radians.  The generated
    wavelength is twice the pump (degenerate operation only).
    """

    pump_wavelength: float
    degenerate_wavelength: float
    cut_angle: float
    external_cone_angle: float

    def __post_init__(self):
        if self.pump_wavelength <= 0.0:
            raise DomainError("pump_wavelength must be > 0")
        if not math.isclose(self.degenerate_wavelength,
                            2.0 * self.pump_wavelength, rel_tol=1e-9):
            raise DomainError(
                "degenerate_wavelength must equal twice the pump wavelength")
        if not 0.0 < self.cut_angle < math.pi / 2.0:
            raise DomainError("cut_angle must lie in (0, pi/2)")
        if not 0.0 <= self.external_cone_angle < math.pi / 2.0:
            raise DomainError("external_cone_angle must lie in [0, pi/2)")

    @classmethod
    def degenerate(cls, pump_wavelength: float, cut_angle: float,
                   external_cone_angle: float) -> "PhaseMatchGeometry":
        return cls(pump_wavelength, 2.0 * pump_wavelength, cut_angle,
                   external_cone_angle)


@dataclass(frozen=True)
class TemporalParams:
    """Group-delay mismatch rates in fs/um.

    d: ordinary-vs-extraordinary rate of the generated pair.
    lam: pump vs pair-average rate.  Informational only; both cancel out
    of the spatial coupling efficiency.
    """

    d: float
    lam: float

    def __post_init__(self):
        for name in ("d", "lam"):
            v = float(getattr(self, name))
            if math.isnan(v) or math.isinf(v):
                raise DomainError(f"{name} must be finite, got {v}")


def q_over_kbar(geometry: PhaseMatchGeometry, n_bar: float) -> float:
    """Normalized transverse phase-matching wave-vector.

    Refracts the external cone angle into the crystal and returns the
    sine of the internal angle, sin(asin(sin(ext)/n_bar)).  n_bar = 1
    is allowed as the vacuum (no-refraction) limit.
    """
    if n_bar < 1.0:
        raise DomainError(f"n_bar must be >= 1, got {n_bar}")
    s = math.sin(geometry.external_cone_angle) / n_bar
    if abs(s) >= 1.0:
        raise DomainError("external cone angle does not refract into the crystal")
    return math.sin(math.asin(s))


def _group_index(n_of_lam, lam: float, step: float = _DERIV_STEP_UM) -> float:
    # n_g = n - lambda * dn/dlambda, derivative by central difference
    dn = (n_of_lam(lam + step) - n_of_lam(lam - step)) / (2.0 * step)
    return n_of_lam(lam) - lam * dn


def group_delay_params(model: IndexModel, geometry: PhaseMatchGeometry,
                       step: float = _DERIV_STEP_UM) -> TemporalParams:
    """Group-delay mismatch rates D and Lambda of the geometry.

    Inverse group velocities are n_g/c with the group index from a
    central difference of the index model (default step 1 nm); the pump
    travels as an extraordinary ray at the cut angle.
    """
    lam_p = geometry.pump_wavelength
    lam_d = geometry.degenerate_wavelength
    theta = geometry.cut_angle
    for lam in (lam_p, lam_d):
        _check_range(model, lam - step)
        _check_range(model, lam + step)
    inv_u_o = _group_index(lambda l: ordinary_index(model, l), lam_d, step) / _C_UM_PER_FS
    inv_u_e = _group_index(lambda l: extraordinary_index(model, l, theta),
                           lam_d, step) / _C_UM_PER_FS
    inv_u_p = _group_index(lambda l: extraordinary_index(model, l, theta),
                           lam_p, step) / _C_UM_PER_FS
    return TemporalParams(d=inv_u_o - inv_u_e,
                          lam=inv_u_p - 0.5 * (inv_u_o + inv_u_e))


def build_walkoff_set(model: IndexModel,
                      geometry: PhaseMatchGeometry) -> WalkOffSet:
    """Walk-off numbers of the geometry from the index model.

    The pump walk-off is evaluated at the pump wavelength, the generated
    one at the degenerate wavelength, both at the cut angle.  The mean
    generated wave-vector uses the harmonic mean of the ordinary and
    angled extraordinary indices at the degenerate wavelength.
    """
    m_p = walk_off_tangent(model, geometry.pump_wavelength, geometry.cut_angle)
    m = walk_off_tangent(model, geometry.degenerate_wavelength,
                         geometry.cut_angle)
    n_o = ordinary_index(model, geometry.degenerate_wavelength)
    n_e = extraordinary_index(model, geometry.degenerate_wavelength,
                              geometry.cut_angle)
    n_bar = 2.0 * n_o * n_e / (n_o + n_e)
    return WalkOffSet(m_p=m_p, m=m, q_over_k=q_over_kbar(geometry, n_bar))


def phase_match_angle(model: IndexModel, pump_wavelength: float,
                      bracket_deg: tuple[float, float] = (30.0, 60.0),
                      tol_rad: float = 1e-6) -> float:
    """Collinear degenerate type-II phase-matching angle, by bisection.

    Solves n_e(theta, lam_p) = (n_o(2 lam_p) + n_e(theta, 2 lam_p)) / 2
    on the bracket (degrees); returns theta in radians.
    """
    lam_p = pump_wavelength
    lam_d = 2.0 * pump_wavelength

    def mismatch(theta: float) -> float:
        return (extraordinary_index(model, lam_p, theta)
                - 0.5 * (ordinary_index(model, lam_d)
                         + extraordinary_index(model, lam_d, theta)))

    a, b = (math.radians(v) for v in bracket_deg)
    fa, fb = mismatch(a), mismatch(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0.0) == (fb > 0.0):
        raise DomainError(
            f"no phase-matching angle in [{bracket_deg[0]}, {bracket_deg[1]}] deg")
    while b - a > tol_rad:
        mid = 0.5 * (a + b)
        fm = mismatch(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (fa > 0.0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


# ---------------------------------------------------------------------------
# index-model data files
# ---------------------------------------------------------------------------

def load_index_model(path: str | Path) -> IndexModel:
    """Load an IndexModel from a JSON Sellmeier data file.

    Expected schema: {"material": str, "citation": str, and for each of
    "ordinary"/"extraordinary" an object {"form": "sellmeier-1",
    "coeffs": [c0, c1, c2, c3], "range_um": [lo, hi]}}.  The model's
    validity range is the intersection of the two polarizations' ranges.
    """
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return _model_from_doc(doc, str(path))


def _model_from_doc(doc: dict, origin: str) -> IndexModel:
    try:
        material = doc["material"]
        pols = {pol: doc[pol] for pol in ("ordinary", "extraordinary")}
    except (KeyError, TypeError) as exc:
        raise DomainError(f"{origin}: malformed Sellmeier file: {exc}") from exc
    forms = {pols[p].get("form", "sellmeier-1") for p in pols}
    if forms != {"sellmeier-1"}:
        raise DomainError(f"{origin}: unsupported dispersion form {forms}")
    try:
        coeffs = {p: tuple(float(c) for c in pols[p]["coeffs"]) for p in pols}
        ranges = {p: tuple(float(v) for v in pols[p]["range_um"]) for p in pols}
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"{origin}: malformed Sellmeier file: {exc}") from exc
    lo = max(ranges["ordinary"][0], ranges["extraordinary"][0])
    hi = min(ranges["ordinary"][1], ranges["extraordinary"][1])
    if not lo < hi:
        raise DomainError(f"{origin}: polarization ranges do not overlap")
    return IndexModel(material=material,
                      ordinary=coeffs["ordinary"],
                      extraordinary=coeffs["extraordinary"],
                      range_um=(lo, hi),
                      citation=str(doc.get("citation", "")))


def bundled_bbo() -> IndexModel:
    """The BBO index model shipped with the package."""
    data = resources.files("spdcfc").joinpath("data/bbo_sellmeier.json")
    return _model_from_doc(json.loads(data.read_text(encoding="utf-8")),
                           "bundled bbo_sellmeier.json")
