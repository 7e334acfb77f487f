"""Scene construction and rendering.

A scene is a rectangular emitting screen, an ellipsoid-patch face, a camera
point and the optics configuration.  Rendering evaluates the reflected
intensity at every face grid point and quantizes to an 8-bit image whose
pixel (u, v) corresponds to face grid point (u, v).  No camera projection is
involved; the camera position only fixes the viewing direction per point.

Conventions (world frame):
  * the screen is centered on its `origin` and spans `width` along its local
    u axis and `height` along its local v axis; for the default normal
    (0, 0, 1) these are +x (content left -> right) and +y (content bottom ->
    top), i.e. content pixel column 0 sits at -x and row 0 at +y,
  * the face fronts the screen: its patch is sampled around the -z direction,
    so face image columns run -x -> +x exactly like screen content columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple, Union

import numpy as np

from .errors import DomainError, GeometryError
from .optics import EmitterUnit, FacePoint, OpticsConfig, unit, vec3
from .ppm import require_image

_COPLANAR_TOL = 1e-9


def _screen_axes(normal: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Deterministic in-plane (u, v) basis for a screen with the given normal."""
    n = unit(normal)
    up = np.array([0.0, 1.0, 0.0])
    if abs(float(n @ up)) > 0.999:
        up = np.array([0.0, 0.0, 1.0])
    u = unit(np.cross(up, n))
    v = np.cross(n, u)
    return u, v


@dataclass(frozen=True)
class ScreenModel:
    """Grid of emitting cells on a plane: positions/radiance are (rows, cols, 3)."""

    positions: np.ndarray
    radiance: np.ndarray
    normal: np.ndarray
    width: float
    height: float
    origin: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        rad = np.asarray(self.radiance, dtype=float)
        if pos.ndim != 3 or pos.shape[2] != 3 or pos.shape[0] < 1 or pos.shape[1] < 1:
            raise DomainError(f"positions must be (rows, cols, 3), got {pos.shape}")
        if rad.shape != pos.shape:
            raise DomainError("radiance grid must match the position grid")
        if np.any(rad < 0):
            raise DomainError("unit radiance must be >= 0")
        n = unit(self.normal)
        origin = vec3(self.origin)
        off = (pos - origin) @ n
        if np.max(np.abs(off)) > _COPLANAR_TOL:
            raise GeometryError("screen units are not coplanar")
        for axis in (0, 1):
            if pos.shape[axis] > 2:
                d = np.diff(pos, axis=axis)
                if np.max(np.abs(d - d.take([0], axis=axis))) > 1e-9:
                    raise GeometryError("screen unit spacing is not uniform")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "radiance", rad)
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "origin", origin)
        if self.width <= 0 or self.height <= 0:
            raise DomainError("screen physical dimensions must be > 0")

    @property
    def rows(self) -> int:
        return self.positions.shape[0]

    @property
    def cols(self) -> int:
        return self.positions.shape[1]

    def emitter_units(self) -> List[EmitterUnit]:
        return [
            EmitterUnit(self.positions[i, j], self.radiance[i, j])
            for i in range(self.rows)
            for j in range(self.cols)
        ]

    def with_radiance(self, radiance: np.ndarray) -> "ScreenModel":
        """Same geometry, new per-unit radiance grid."""
        return ScreenModel(self.positions, radiance, self.normal, self.width, self.height, self.origin)


def _cell_means(content: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Mean RGB of each grid cell; cell edges partition the image evenly."""
    h, w = content.shape[:2]
    re = (np.arange(rows + 1) * h) // rows
    ce = (np.arange(cols + 1) * w) // cols
    out = np.empty((rows, cols, 3), dtype=float)
    for i in range(rows):
        for j in range(cols):
            out[i, j] = content[re[i] : re[i + 1], ce[j] : ce[j + 1]].reshape(-1, 3).mean(axis=0)
    return out


def screen_grid_positions(rows, cols, width, height, origin, normal):
    """Cell-center positions of a rows x cols screen grid, (rows, cols, 3)."""
    origin = vec3(origin)
    u, v = _screen_axes(normal)
    us = ((np.arange(cols) + 0.5) / cols - 0.5) * width
    vs = (0.5 - (np.arange(rows) + 0.5) / rows) * height
    return origin + us[None, :, None] * u + vs[:, None, None] * v


def screen_from_image(
    content,
    physical: Tuple[float, float],
    grid: Tuple[int, int],
    origin,
    normal,
    radiance_scale: float = 100.0,
) -> ScreenModel:
    """Discretize an RGB content image into an emitting screen.

    Each grid cell's radiance is the mean RGB of its image cell scaled
    linearly: value / 255 * radiance_scale.  Content row 0 maps to the top of
    the screen, column 0 to its left edge (as seen looking along -normal).
    """
    content = require_image(content)
    width, height = physical
    rows, cols = grid
    if rows < 1 or cols < 1:
        raise DomainError("screen grid must be at least 1x1")
    if rows > content.shape[0] or cols > content.shape[1]:
        raise DomainError(
            f"grid {rows}x{cols} exceeds content resolution {content.shape[0]}x{content.shape[1]}"
        )
    if radiance_scale < 0:
        raise DomainError("radiance_scale must be >= 0")
    radiance = _cell_means(content.astype(float), rows, cols) / 255.0 * radiance_scale
    positions = screen_grid_positions(rows, cols, width, height, origin, normal)
    return ScreenModel(positions, radiance, unit(normal), float(width), float(height), vec3(origin))


@dataclass(frozen=True)
class FaceModel:
    """Ellipsoid-patch face: point/normal grids are (U, V, 3), coefficients uniform."""

    positions: np.ndarray
    normals: np.ndarray
    center: np.ndarray
    semi_axes: Tuple[float, float, float]
    k_d: float = 0.55
    k_s: float = 0.25
    k_a: float = 0.35
    n_s: float = 2.0

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        nrm = np.asarray(self.normals, dtype=float)
        if pos.ndim != 3 or pos.shape[2] != 3 or pos.shape[0] < 2 or pos.shape[1] < 2:
            raise DomainError(f"face grid must be at least 2x2, got {pos.shape}")
        if nrm.shape != pos.shape:
            raise DomainError("normal grid must match the position grid")
        norms = np.linalg.norm(nrm, axis=2)
        if np.max(np.abs(norms - 1.0)) > 1e-9:
            raise DomainError("face normals must be unit-norm")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "normals", nrm)
        object.__setattr__(self, "center", vec3(self.center))

    @property
    def grid_shape(self) -> Tuple[int, int]:
        return self.positions.shape[:2]

    def point(self, u: int, v: int) -> FacePoint:
        return FacePoint(
            self.positions[u, v], self.normals[u, v], self.k_d, self.k_s, self.k_a, self.n_s
        )


def build_face(
    center,
    semi_axes: Tuple[float, float, float],
    grid: Tuple[int, int],
    k_d: float = 0.55,
    k_s: float = 0.25,
    k_a: float = 0.35,
    n_s: float = 2.0,
    patch_degrees: float = 80.0,
) -> FaceModel:
    """Sample an ellipsoid patch facing -z (toward the screen).

    The patch spans +-patch_degrees in azimuth (columns, -x -> +x) and
    elevation (rows, +y -> -y, so row 0 is the top of the face).  Normals are
    the analytic outward ellipsoid gradients, normalized.
    """
    a, b, c = (float(s) for s in semi_axes)
    if min(a, b, c) <= 0:
        raise DomainError(f"semi-axes must be > 0, got {semi_axes}")
    rows, cols = grid
    if rows < 2 or cols < 2:
        raise DomainError("face grid must be at least 2x2")
    if not 0 < patch_degrees <= 90:
        raise DomainError("patch_degrees must lie in (0, 90]")
    center = vec3(center)
    ext = np.deg2rad(patch_degrees)
    beta = np.linspace(ext, -ext, rows)  # elevation, top row first
    alpha = np.linspace(-ext, ext, cols)  # azimuth, -x first
    bb, aa = np.meshgrid(beta, alpha, indexing="ij")
    local = np.stack(
        [a * np.cos(bb) * np.sin(aa), b * np.sin(bb), -c * np.cos(bb) * np.cos(aa)], axis=2
    )
    positions = center + local
    grad = local / np.array([a * a, b * b, c * c])
    normals = grad / np.linalg.norm(grad, axis=2, keepdims=True)
    return FaceModel(positions, normals, center, (a, b, c), k_d, k_s, k_a, n_s)


@dataclass(frozen=True)
class Scene:
    """Screen + face + camera + optics, with a fixed or automatic exposure."""

    screen: ScreenModel
    face: FaceModel
    camera: np.ndarray
    optics: OpticsConfig = field(default_factory=OpticsConfig)
    exposure: Union[float, str] = "auto"

    def __post_init__(self):
        object.__setattr__(self, "camera", vec3(self.camera))
        if isinstance(self.exposure, str):
            if self.exposure != "auto":
                raise DomainError(f"exposure must be a positive number or 'auto', got {self.exposure!r}")
        elif self.exposure <= 0:
            raise DomainError(f"exposure must be > 0, got {self.exposure}")
        rel = (self.camera - self.face.center) / np.asarray(self.face.semi_axes)
        if float(rel @ rel) <= 1.0:
            raise GeometryError("camera lies inside the face ellipsoid")
        d0 = (self.face.positions - self.screen.origin) @ self.screen.normal
        if np.min(d0) <= 0:
            raise GeometryError("face must be strictly in front of the screen plane")


def quantize(values: np.ndarray) -> np.ndarray:
    """Clamp to [0, 255] and round half-up to uint8."""
    return np.clip(np.floor(np.asarray(values, dtype=float) + 0.5), 0, 255).astype(np.uint8)


def face_screen_weights(scene: Scene) -> np.ndarray:
    """Per (face point, screen unit) scalar weights of the linear render.

    The rendered linear intensity is `weights @ radiance + k_a * ambient`,
    with weights[p, e] = cos^g(te)/d^2 * (k_d cos(tr) + k_s cos^{n_s}(tm)),
    all cosines clamped at 0.  Shape (U*V, rows*cols).
    """
    face, screen = scene.face, scene.screen
    fpos = face.positions.reshape(-1, 3)
    fnrm = face.normals.reshape(-1, 3)
    epos = screen.positions.reshape(-1, 3)

    ef = fpos[:, None, :] - epos[None, :, :]  # emitter -> face
    d2 = np.einsum("peq,peq->pe", ef, ef)
    if np.any(d2 == 0.0):
        raise GeometryError("a face point coincides with a screen unit")
    d = np.sqrt(d2)
    e_hat = ef / d[:, :, None]

    cos_e = np.clip(e_hat @ screen.normal, 0.0, 1.0)
    cos_r = np.clip(-np.einsum("peq,pq->pe", e_hat, fnrm), 0.0, 1.0)
    dot_en = np.einsum("peq,pq->pe", e_hat, fnrm)
    m_hat = e_hat - 2.0 * dot_en[:, :, None] * fnrm[:, None, :]
    view = scene.camera - fpos
    vn = np.linalg.norm(view, axis=1)
    if np.any(vn == 0.0):
        raise GeometryError("camera coincides with a face point")
    v_hat = view / vn[:, None]
    cos_m = np.clip(np.einsum("peq,pq->pe", m_hat, v_hat), 0.0, 1.0)

    falloff = cos_e**scene.optics.g / d2
    return falloff * (face.k_d * cos_r + face.k_s * cos_m**face.n_s)


def render_linear(scene: Scene, weights: np.ndarray = None) -> np.ndarray:
    """Un-exposed linear intensity per face grid point, shape (U, V, 3)."""
    if weights is None:
        weights = face_screen_weights(scene)
    rad = scene.screen.radiance.reshape(-1, 3)
    linear = weights @ rad + scene.face.k_a * scene.optics.ambient
    u, v = scene.face.grid_shape
    return linear.reshape(u, v, 3)


def resolve_exposure(scene: Scene, linear: np.ndarray) -> float:
    """Fixed exposure passes through; 'auto' maps the 99th percentile to 240."""
    if scene.exposure != "auto":
        return float(scene.exposure)
    p99 = float(np.percentile(linear, 99.0))
    if p99 <= 0.0:
        raise DomainError("auto exposure needs nonzero radiance or ambient light")
    return 240.0 / p99


def render_face(scene: Scene, weights: np.ndarray = None) -> np.ndarray:
    """Render the face to an (U, V, 3) uint8 image."""
    linear = render_linear(scene, weights)
    return quantize(resolve_exposure(scene, linear) * linear)


# ---------------------------------------------------------------------------
# 2-D importance-weight curves along a screen segment


@dataclass(frozen=True)
class WeightCurve:
    """Diffuse/specular importance weights of one face point per screen unit."""

    unit_x: np.ndarray
    g_d: np.ndarray
    g_s: np.ndarray


def _pad3(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape == (2,):
        return np.array([v[0], v[1], 0.0])
    if v.shape == (3,):
        return v.copy()
    raise DomainError(f"expected a 2- or 3-vector, got shape {v.shape}")


def simulate_weight_curves(
    unit_xs: Sequence[float],
    points: Sequence[Tuple[Sequence[float], Sequence[float]]],
    camera_x: float,
    g: float = 30.0,
    n_s: float = 2.0,
) -> List[WeightCurve]:
    """Importance-weight curves along a screen segment.

    The screen is the segment of `unit_xs` on the x axis with normal +y; the
    camera sits on the x axis at `camera_x`.  Each entry of `points` is a
    (position, normal) pair with y != 0; 2-vectors are taken in the x-y
    simulation plane, 3-vectors allow out-of-plane normals.  Returns one
    curve of (G_d, G_s) per point, sampled at every screen unit.
    """
    xs = np.asarray(unit_xs, dtype=float)
    if xs.ndim != 1 or xs.size < 2:
        raise DomainError("need at least two screen units")
    screen_n = np.array([0.0, 1.0, 0.0])
    cam = np.array([float(camera_x), 0.0, 0.0])
    curves = []
    for pos, nrm in points:
        p = _pad3(pos)
        if p[1] == 0.0:
            raise GeometryError("face point lies on the screen line")
        n = _pad3(nrm)
        n = n / np.linalg.norm(n)

        epos = np.stack([xs, np.zeros_like(xs), np.zeros_like(xs)], axis=1)
        ef = p[None, :] - epos
        d = np.linalg.norm(ef, axis=1)
        e_hat = ef / d[:, None]
        cos_e = np.clip(e_hat @ screen_n, 0.0, 1.0)
        cos_r = np.clip(-(e_hat @ n), 0.0, 1.0)
        m_hat = e_hat - 2.0 * (e_hat @ n)[:, None] * n[None, :]
        v = cam - p
        v_hat = v / np.linalg.norm(v)
        cos_m = np.clip(m_hat @ v_hat, 0.0, 1.0)

        w = cos_e**g * cos_e * cos_e
        curves.append(WeightCurve(xs.copy(), w * cos_r, w * cos_m**n_s))
    return curves


def count_local_maxima(ys) -> int:
    """Number of local maxima of a sampled curve; plateaus count once."""
    ys = np.asarray(ys, dtype=float)
    slopes = np.sign(np.diff(ys))
    filled = []
    prev = 0.0
    for s in slopes:
        if s != 0.0:
            prev = s
        filled.append(prev)
    filled = np.asarray(filled)
    nonzero = filled[filled != 0]
    if nonzero.size == 0:
        return 1  # constant curve: a single (degenerate) maximum
    count = int(np.sum((nonzero[:-1] > 0) & (nonzero[1:] < 0)))
    if nonzero[0] < 0:
        count += 1  # falling from the left edge
    if nonzero[-1] > 0:
        count += 1  # rising into the right edge
    return count


def peak_location(curve: WeightCurve, which: str = "g_d") -> float:
    ys = getattr(curve, which)
    return float(curve.unit_x[int(np.argmax(ys))])


def fwhm(curve: WeightCurve, which: str = "g_d") -> float:
    """Full width at half maximum with linear interpolation at the crossings.

    A side that never falls below half maximum contributes its end of the
    sampled interval.
    """
    xs = curve.unit_x
    ys = getattr(curve, which)
    k = int(np.argmax(ys))
    half = ys[k] / 2.0
    if ys[k] <= 0.0:
        return 0.0

    left = xs[0]
    for i in range(k, 0, -1):
        if ys[i - 1] < half <= ys[i]:
            t = (half - ys[i - 1]) / (ys[i] - ys[i - 1])
            left = xs[i - 1] + t * (xs[i] - xs[i - 1])
            break
    right = xs[-1]
    for i in range(k, len(ys) - 1):
        if ys[i + 1] < half <= ys[i]:
            t = (ys[i] - half) / (ys[i] - ys[i + 1])
            right = xs[i] + t * (xs[i + 1] - xs[i])
            break
    return float(right - left)


def write_weight_curves_csv(path, curves: Sequence[WeightCurve]) -> None:
    """One `unit_x,G_d,G_s` block per curve, blank-line separated."""
    blocks = []
    for curve in curves:
        lines = ["unit_x,G_d,G_s"]
        for x, gd, gs in zip(curve.unit_x, curve.g_d, curve.g_s):
            lines.append(f"{float(x)!r},{float(gd)!r},{float(gs)!r}")
        blocks.append("\n".join(lines))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n\n".join(blocks))
        fh.write("\n")
