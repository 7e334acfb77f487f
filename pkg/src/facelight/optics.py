"""Reflection physics for a light-emitting screen illuminating a face.

Every screen cell is a directional point emitter whose output falls off as
cos^g of the off-normal angle.  A face point reflects the incident light with
a diffuse term (cos of the receive angle), a specular term (cos^n_s of the
angle between the mirror direction and the viewing direction) and a constant
ambient term:

    per emitter:  I_f = I_e * cos^g(theta_e) / d^2
    total:        sum k_d * I_f * cos(theta_r)
                + sum k_s * I_f * cos^{n_s}(theta_m)
                + k_a * I_a

For a planar screen the same quantity can be written with per-emitter
importance weights and a single perpendicular distance d0 from the face point
to the screen plane:

    total = (1/d0^2) * sum I_e * (k_d * G_d + k_s * G_s) + k_a * I_a
    G_d = cos^g(theta_e) * cos^2(theta_e) * cos(theta_r)
    G_s = cos^g(theta_e) * cos^2(theta_e) * cos^{n_s}(theta_m)

Both formulations are implemented; they agree to ~1e-9 relative on planar
screens and the agreement is enforced by tests.

All cosines are clamped to >= 0 so that occluded / back-facing terms
contribute nothing.  Angles are computed from normalized dot products; acos
only appears at API boundaries that take angles in radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, GeometryError

HALF_PI = math.pi / 2.0

# Defaults for the emitter falloff exponent and the shininess exponent.
DEFAULT_G = 30.0
DEFAULT_SHININESS = 2.0

_UNIT_TOL = 1e-6


def vec3(x, y=None, z=None) -> np.ndarray:
    """Build a float (3,) vector from components or any length-3 sequence."""
    if y is None:
        v = np.asarray(x, dtype=float)
        if v.shape != (3,):
            raise DomainError(f"expected a 3-vector, got shape {v.shape}")
        return v
    return np.array([x, y, z], dtype=float)


def unit(v) -> np.ndarray:
    """Normalize to unit length; degenerate (near-zero) vectors are an error."""
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n < 1e-300:
        raise GeometryError("cannot normalize a zero-length vector")
    return v / n


def _require_unit(v: np.ndarray, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > _UNIT_TOL:
        raise DomainError(f"{name} must be unit-norm, |v| = {np.linalg.norm(v)!r}")
    return v


@dataclass(frozen=True)
class EmitterUnit:
    """One light-emitting screen cell: position (m) and per-RGB radiance (>= 0)."""

    position: np.ndarray
    radiance: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", vec3(self.position))
        object.__setattr__(self, "radiance", vec3(self.radiance))
        if np.any(self.radiance < 0):
            raise DomainError("emitter radiance components must be >= 0")


@dataclass(frozen=True)
class FacePoint:
    """A surface sample of the face: position, outward unit normal, reflection coefficients."""

    position: np.ndarray
    normal: np.ndarray
    k_d: float = 0.5
    k_s: float = 0.3
    k_a: float = 0.3
    n_s: float = DEFAULT_SHININESS

    def __post_init__(self):
        object.__setattr__(self, "position", vec3(self.position))
        object.__setattr__(self, "normal", _require_unit(self.normal, "face normal"))
        for name in ("k_d", "k_s", "k_a"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v}")
        if self.n_s < 1.0:
            raise DomainError(f"shininess exponent must be >= 1, got {self.n_s}")


def _default_ambient() -> np.ndarray:
    return np.zeros(3)


@dataclass(frozen=True)
class OpticsConfig:
    """Emitter falloff exponent g and the ambient intensity per RGB channel."""

    g: float = DEFAULT_G
    ambient: np.ndarray = field(default_factory=_default_ambient)

    def __post_init__(self):
        object.__setattr__(self, "ambient", vec3(self.ambient))
        if self.g < 0:
            raise DomainError(f"angular-distribution exponent must be >= 0, got {self.g}")
        if np.any(self.ambient < 0):
            raise DomainError("ambient intensity components must be >= 0")


def angular_distribution(theta: float, g: float) -> float:
    """Emitter falloff cos^g(theta) for theta in [0, pi/2]."""
    if not 0.0 <= theta <= HALF_PI:
        raise DomainError(f"theta must lie in [0, pi/2], got {theta}")
    if g < 0:
        raise DomainError(f"exponent g must be >= 0, got {g}")
    return math.cos(theta) ** g


def incident_intensity(i_e, theta_e: float, d_ef: float, g: float):
    """Intensity arriving at a face point: I_e * cos^g(theta_e) / d^2.

    i_e may be a scalar or a per-channel vector; the result has the same shape.
    """
    if d_ef <= 0.0:
        raise GeometryError(f"emitter-face distance must be > 0, got {d_ef}")
    w = angular_distribution(theta_e, g)
    return np.asarray(i_e, dtype=float) * (w / (d_ef * d_ef))


def mirror_direction(incident: np.ndarray, normal: np.ndarray) -> np.ndarray:
    """Reflect an incident direction about a surface normal: d - 2(d.n)n.

    `incident` points from the emitter toward the surface; both inputs must be
    unit vectors.  The result is unit-norm and reflecting it again returns the
    incident direction.
    """
    d = _require_unit(incident, "incident direction")
    n = _require_unit(normal, "surface normal")
    return d - 2.0 * float(d @ n) * n


def diffuse_weight(theta_e: float, theta_r: float, g: float) -> float:
    """Per-emitter diffuse importance weight cos^g(te) * cos^2(te) * cos(tr)."""
    if not 0.0 <= theta_r <= HALF_PI:
        raise DomainError(f"theta_r must lie in [0, pi/2], got {theta_r}")
    w = angular_distribution(theta_e, g)
    ce = math.cos(theta_e)
    return w * ce * ce * math.cos(theta_r)


def specular_weight(theta_e: float, theta_m: float, g: float, n_s: float) -> float:
    """Per-emitter specular importance weight cos^g(te) * cos^2(te) * cos^{n_s}(tm).

    theta_m may reach pi; cos(theta_m) is clamped at 0 so back-facing specular
    lobes contribute nothing.
    """
    if not 0.0 <= theta_m <= math.pi:
        raise DomainError(f"theta_m must lie in [0, pi], got {theta_m}")
    w = angular_distribution(theta_e, g)
    ce = math.cos(theta_e)
    cm = max(math.cos(theta_m), 0.0)
    return w * ce * ce * cm**n_s


def _cos_clamped(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of the angle between two unit vectors, clamped into [0, 1]."""
    return min(max(float(a @ b), 0.0), 1.0)


def reflected_intensity(
    face_point: FacePoint,
    emitters,
    screen_normal: np.ndarray,
    camera: np.ndarray,
    cfg: OpticsConfig,
) -> np.ndarray:
    """Total reflected intensity toward the camera, per RGB channel (distance form)."""
    n_e = _require_unit(screen_normal, "screen normal")
    camera = vec3(camera)
    f = face_point.position
    view = camera - f
    if np.linalg.norm(view) == 0.0:
        raise GeometryError("camera coincides with the face point")
    v_hat = unit(view)

    emitters = list(emitters)
    if not emitters and not np.any(cfg.ambient > 0):
        raise DomainError("no emitters and no ambient light: nothing to reflect")

    total = face_point.k_a * cfg.ambient.copy()
    n_f = face_point.normal
    for em in emitters:
        ef = f - em.position
        d = float(np.linalg.norm(ef))
        if d == 0.0:
            raise GeometryError("face point coincides with an emitter")
        e_hat = ef / d
        cos_e = _cos_clamped(e_hat, n_e)
        i_f = em.radiance * (cos_e**cfg.g / (d * d))
        cos_r = _cos_clamped(-e_hat, n_f)
        m_hat = e_hat - 2.0 * float(e_hat @ n_f) * n_f
        cos_m = _cos_clamped(m_hat, v_hat)
        total = total + i_f * (face_point.k_d * cos_r + face_point.k_s * cos_m**face_point.n_s)
    return total


def reflected_intensity_planar(
    face_point: FacePoint,
    emitters,
    screen_normal: np.ndarray,
    screen_origin: np.ndarray,
    camera: np.ndarray,
    cfg: OpticsConfig,
) -> np.ndarray:
    """Total reflected intensity via the importance-weight form for a planar screen.

    Requires the face point strictly in front of the plane through
    `screen_origin` with normal `screen_normal`.
    """
    n_e = _require_unit(screen_normal, "screen normal")
    camera = vec3(camera)
    origin = vec3(screen_origin)
    f = face_point.position
    d0 = float((f - origin) @ n_e)
    if d0 <= 0.0:
        raise GeometryError("face point must be strictly in front of the screen plane")
    view = camera - f
    if np.linalg.norm(view) == 0.0:
        raise GeometryError("camera coincides with the face point")
    v_hat = unit(view)

    emitters = list(emitters)
    if not emitters and not np.any(cfg.ambient > 0):
        raise DomainError("no emitters and no ambient light: nothing to reflect")

    n_f = face_point.normal
    acc = np.zeros(3)
    for em in emitters:
        e_hat = unit(f - em.position)
        cos_e = _cos_clamped(e_hat, n_e)
        cos_r = _cos_clamped(-e_hat, n_f)
        m_hat = e_hat - 2.0 * float(e_hat @ n_f) * n_f
        cos_m = _cos_clamped(m_hat, v_hat)
        w = cos_e**cfg.g * cos_e * cos_e
        g_d = w * cos_r
        g_s = w * cos_m**face_point.n_s
        acc = acc + em.radiance * (face_point.k_d * g_d + face_point.k_s * g_s)
    return acc / (d0 * d0) + face_point.k_a * cfg.ambient
