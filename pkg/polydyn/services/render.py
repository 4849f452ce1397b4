"""Escape-time rasters of M(d, a) written as binary PGM-style PPM (P5)."""

import logging
from pathlib import Path

import numpy as np

from polydyn.models import RenderSpec
from polydyn.services.unicritical import escape_time_grid, marked_grid

logger = logging.getLogger("polydyn")

# Modulus at which the Green value is read off as log|z_n| / d^n
_BAILOUT = 1e8


def pixel_grid(spec: RenderSpec) -> np.ndarray:
    """Parameters at pixel centers, shape (h, w), top row first."""
    height = spec.width * spec.pixels_h / spec.pixels_w
    left = spec.center.real - spec.width / 2
    top = spec.center.imag + height / 2
    xs = left + (np.arange(spec.pixels_w) + 0.5) * spec.width / spec.pixels_w
    ys = top - (np.arange(spec.pixels_h) + 0.5) * height / spec.pixels_h
    return xs[np.newaxis, :] + 1j * ys[:, np.newaxis]


def pixel_index(spec: RenderSpec, t: complex) -> tuple[int, int]:
    """(row, column) of the pixel containing t."""
    height = spec.width * spec.pixels_h / spec.pixels_w
    column = int((t.real - (spec.center.real - spec.width / 2)) / spec.width * spec.pixels_w)
    row = int(((spec.center.imag + height / 2) - t.imag) / height * spec.pixels_h)
    return row, column


def green_grid(d: int, a, ts: np.ndarray, budget: int) -> np.ndarray:
    """Approximate g_t(a(t)) over an array of parameters; 0 where no escape was seen."""
    z = marked_grid(a, ts)
    values = np.zeros(ts.shape)
    alive = np.ones(ts.shape, dtype=bool)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for n in range(budget + 1):
            r = np.abs(z)
            done = alive & (r > _BAILOUT)
            values[done] = np.log(r[done]) / float(d) ** n
            alive &= ~done
            if not alive.any() or n == budget:
                break
            z = np.where(alive, z**d + ts, z)
    return values


def render(spec: RenderSpec) -> bytes:
    """
    Rasterize M(d, a) for z^d + t.

    Args:
        spec: Degree, marked point, viewport, resolution, budget and palette

    Returns:
        The complete P5 file: header ``P5\\n<w> <h>\\n255\\n`` then one byte per pixel
    """
    ts = pixel_grid(spec)
    steps = escape_time_grid(spec.degree, spec.marked, ts, spec.budget)
    inside = steps < 0
    if spec.palette == "binary":
        pixels = np.where(inside, 0, 255).astype(np.uint8)
    else:
        g = green_grid(spec.degree, spec.marked, ts, spec.budget)
        shade = np.clip(np.rint(255.0 * g / (g + 1.0)), 1, 255)
        pixels = np.where(inside, 0, shade).astype(np.uint8)
    logger.debug(f"Rendered {spec.pixels_w}x{spec.pixels_h}, {int(inside.sum())} pixels inside")
    header = f"P5\n{spec.pixels_w} {spec.pixels_h}\n255\n".encode("ascii")
    return header + pixels.tobytes()


def write_ppm(path: Path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)
    logger.info(f"Wrote {path} ({len(data)} bytes)")
