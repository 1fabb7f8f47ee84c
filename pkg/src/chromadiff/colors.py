"""Space-tagged color values and conversions among sRGB, linear RGB, XYZ,
CIELAB, CIELUV, HSV and HSL.

All conversions are anchored at a reference white (D65, 2 degree observer by
default) and route through linear RGB / XYZ, so any space can be reached from
any other with `convert`. Scalar functions operate on the named tuples below;
`convert_array` is the vectorized equivalent for (N, 3) pixel blocks.
"""

from __future__ import annotations

import re
from enum import Enum
from typing import NamedTuple, Union

import numpy as np


class ColorSpace(str, Enum):
    SRGB8 = "srgb8"
    LINEAR_RGB = "linear_rgb"
    XYZ = "xyz"
    LAB = "lab"
    LUV = "luv"
    HSV = "hsv"
    HSL = "hsl"


class Srgb8(NamedTuple):
    """Gamma-encoded sRGB with integer channels in [0, 255]."""

    r: int
    g: int
    b: int


class LinearRgb(NamedTuple):
    """Linear-light RGB in [0, 1]; intermediates may leave that range."""

    r: float
    g: float
    b: float


class Xyz(NamedTuple):
    """CIE tristimulus values scaled so the reference white has y = 1."""

    x: float
    y: float
    z: float


class WhitePoint(NamedTuple):
    """Tristimulus of the reference white; yn is always 1."""

    xn: float
    yn: float
    zn: float


class Lab(NamedTuple):
    l: float
    a: float
    b: float


class Luv(NamedTuple):
    l: float
    u: float
    v: float


class Hsv(NamedTuple):
    """Hue in degrees [0, 360); saturation and value in [0, 1]."""

    h: float
    s: float
    v: float


class Hsl(NamedTuple):
    """Hue in degrees [0, 360); saturation and lightness in [0, 1]."""

    h: float
    s: float
    l: float


Color = Union[Srgb8, LinearRgb, Xyz, Lab, Luv, Hsv, Hsl]

_SPACE_OF_TYPE = {
    Srgb8: ColorSpace.SRGB8,
    LinearRgb: ColorSpace.LINEAR_RGB,
    Xyz: ColorSpace.XYZ,
    Lab: ColorSpace.LAB,
    Luv: ColorSpace.LUV,
    Hsv: ColorSpace.HSV,
    Hsl: ColorSpace.HSL,
}


def space_of(color: Color) -> ColorSpace:
    """Return the space tag implied by a color value's type."""
    try:
        return _SPACE_OF_TYPE[type(color)]
    except KeyError:
        raise TypeError(f"not a color value: {color!r}") from None


def _srgb_matrix() -> np.ndarray:
    # Derived from the IEC 61966-2-1 primaries and D65 white chromaticities,
    # so the rows sum exactly to the white point (see Lindbloom, "RGB/XYZ
    # Matrices"). Using the rounded 4-digit matrices instead would put white
    # a few 1e-6 off L* = 100.
    xr, yr = 0.64, 0.33
    xg, yg = 0.30, 0.60
    xb, yb = 0.15, 0.06
    xw, yw = 0.3127, 0.3290
    primaries = np.array([
        [xr / yr, xg / yg, xb / yb],
        [1.0, 1.0, 1.0],
        [(1 - xr - yr) / yr, (1 - xg - yg) / yg, (1 - xb - yb) / yb],
    ])
    white = np.array([xw / yw, 1.0, (1 - xw - yw) / yw])
    scale = np.linalg.solve(primaries, white)
    return primaries * scale


RGB_TO_XYZ_MATRIX = _srgb_matrix()
XYZ_TO_RGB_MATRIX = np.linalg.inv(RGB_TO_XYZ_MATRIX)

_row_sums = RGB_TO_XYZ_MATRIX.sum(axis=1)
D65 = WhitePoint(float(_row_sums[0] / _row_sums[1]), 1.0, float(_row_sums[2] / _row_sums[1]))

# CIELAB f() branch point and linear-branch slope (t = (6/29)^3).
_DELTA = 6.0 / 29.0
_DELTA3 = _DELTA**3
_LINEAR_SLOPE = 1.0 / (3.0 * _DELTA**2)


def _lab_f(t: float) -> float:
    if t > _DELTA3:
        return t ** (1.0 / 3.0)
    return _LINEAR_SLOPE * t + 4.0 / 29.0


def _lab_f_inv(u: float) -> float:
    if u > _DELTA:
        return u**3
    return (u - 4.0 / 29.0) / _LINEAR_SLOPE


def srgb_to_linear(c: Srgb8) -> LinearRgb:
    """Decode gamma-encoded 8-bit sRGB to linear-light RGB."""
    return LinearRgb(*(_decode_channel(v / 255.0) for v in c))


def _decode_channel(v: float) -> float:
    if v <= 0.04045:
        return v / 12.92
    return ((v + 0.055) / 1.055) ** 2.4


def linear_to_srgb(c: LinearRgb) -> Srgb8:
    """Encode linear RGB to 8-bit sRGB, clamping to [0, 1] first."""
    return Srgb8(*(_encode_channel(v) for v in c))


def _encode_channel(v: float) -> int:
    v = min(max(v, 0.0), 1.0)
    if v <= 0.0031308:
        enc = 12.92 * v
    else:
        enc = 1.055 * v ** (1.0 / 2.4) - 0.055
    return int(round(enc * 255.0))


def rgb_to_xyz(c: LinearRgb) -> Xyz:
    """Linear RGB to XYZ via the sRGB primaries (D65 white)."""
    m = RGB_TO_XYZ_MATRIX
    return Xyz(
        m[0, 0] * c.r + m[0, 1] * c.g + m[0, 2] * c.b,
        m[1, 0] * c.r + m[1, 1] * c.g + m[1, 2] * c.b,
        m[2, 0] * c.r + m[2, 1] * c.g + m[2, 2] * c.b,
    )


def xyz_to_rgb(c: Xyz) -> LinearRgb:
    m = XYZ_TO_RGB_MATRIX
    return LinearRgb(
        m[0, 0] * c.x + m[0, 1] * c.y + m[0, 2] * c.z,
        m[1, 0] * c.x + m[1, 1] * c.y + m[1, 2] * c.z,
        m[2, 0] * c.x + m[2, 1] * c.y + m[2, 2] * c.z,
    )


def xyz_to_lab(c: Xyz, wp: WhitePoint = D65) -> Lab:
    """XYZ to CIELAB relative to the given white point."""
    fx = _lab_f(c.x / wp.xn)
    fy = _lab_f(c.y / wp.yn)
    fz = _lab_f(c.z / wp.zn)
    return Lab(116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz))


def lab_to_xyz(c: Lab, wp: WhitePoint = D65) -> Xyz:
    """Exact algebraic inverse of `xyz_to_lab`, including the linear branch."""
    fy = (c.l + 16.0) / 116.0
    fx = fy + c.a / 500.0
    fz = fy - c.b / 200.0
    return Xyz(wp.xn * _lab_f_inv(fx), wp.yn * _lab_f_inv(fy), wp.zn * _lab_f_inv(fz))


def _uv_prime(x: float, y: float, z: float) -> tuple[float, float]:
    den = x + 15.0 * y + 3.0 * z
    return 4.0 * x / den, 9.0 * y / den


def xyz_to_luv(c: Xyz, wp: WhitePoint = D65) -> Luv:
    """XYZ to CIELUV; shares the lightness definition with CIELAB."""
    if c.x + 15.0 * c.y + 3.0 * c.z == 0.0:
        if c.x == 0.0 and c.y == 0.0 and c.z == 0.0:
            return Luv(0.0, 0.0, 0.0)
        raise ValueError("degenerate XYZ for Luv: x + 15y + 3z = 0 for a non-black color")
    up, vp = _uv_prime(c.x, c.y, c.z)
    upn, vpn = _uv_prime(*wp)
    l = 116.0 * _lab_f(c.y / wp.yn) - 16.0
    return Luv(l, 13.0 * l * (up - upn), 13.0 * l * (vp - vpn))


def luv_to_xyz(c: Luv, wp: WhitePoint = D65) -> Xyz:
    if c.l == 0.0:
        return Xyz(0.0, 0.0, 0.0)
    upn, vpn = _uv_prime(*wp)
    up = c.u / (13.0 * c.l) + upn
    vp = c.v / (13.0 * c.l) + vpn
    y = wp.yn * _lab_f_inv((c.l + 16.0) / 116.0)
    x = y * 9.0 * up / (4.0 * vp)
    z = y * (12.0 - 3.0 * up - 20.0 * vp) / (4.0 * vp)
    return Xyz(x, y, z)


def rgb_to_hsv(c: Srgb8) -> Hsv:
    """Standard hexcone HSV; achromatic inputs get h = 0 by convention."""
    r, g, b = c.r / 255.0, c.g / 255.0, c.b / 255.0
    mx = max(r, g, b)
    mn = min(r, g, b)
    return Hsv(_hue(r, g, b, mx, mn), 0.0 if mx == 0.0 else (mx - mn) / mx, mx)


def rgb_to_hsl(c: Srgb8) -> Hsl:
    r, g, b = c.r / 255.0, c.g / 255.0, c.b / 255.0
    mx = max(r, g, b)
    mn = min(r, g, b)
    l = (mx + mn) / 2.0
    d = mx - mn
    s = 0.0 if d == 0.0 else d / (1.0 - abs(2.0 * l - 1.0))
    return Hsl(_hue(r, g, b, mx, mn), s, l)


def _hue(r: float, g: float, b: float, mx: float, mn: float) -> float:
    d = mx - mn
    if d == 0.0:
        return 0.0
    if mx == r:
        h = 60.0 * (((g - b) / d) % 6.0)
    elif mx == g:
        h = 60.0 * ((b - r) / d + 2.0)
    else:
        h = 60.0 * ((r - g) / d + 4.0)
    return h % 360.0


def hsv_to_rgb(c: Hsv) -> Srgb8:
    h = c.h % 360.0
    chroma = c.v * c.s
    m = c.v - chroma
    return _from_hue_chroma(h, chroma, m)


def hsl_to_rgb(c: Hsl) -> Srgb8:
    h = c.h % 360.0
    chroma = (1.0 - abs(2.0 * c.l - 1.0)) * c.s
    m = c.l - chroma / 2.0
    return _from_hue_chroma(h, chroma, m)


def _from_hue_chroma(h: float, chroma: float, m: float) -> Srgb8:
    x = chroma * (1.0 - abs((h / 60.0) % 2.0 - 1.0))
    sector = int(h // 60.0) % 6
    r1, g1, b1 = (
        (chroma, x, 0.0),
        (x, chroma, 0.0),
        (0.0, chroma, x),
        (0.0, x, chroma),
        (x, 0.0, chroma),
        (chroma, 0.0, x),
    )[sector]
    return Srgb8(
        int(round((r1 + m) * 255.0)),
        int(round((g1 + m) * 255.0)),
        int(round((b1 + m) * 255.0)),
    )


# Conversion graph: a tree rooted at XYZ. The path between any two spaces is
# the unique tree path; moving through SRGB8 quantizes to 8 bits by design.
_PARENT = {
    ColorSpace.LINEAR_RGB: ColorSpace.XYZ,
    ColorSpace.SRGB8: ColorSpace.LINEAR_RGB,
    ColorSpace.HSV: ColorSpace.SRGB8,
    ColorSpace.HSL: ColorSpace.SRGB8,
    ColorSpace.LAB: ColorSpace.XYZ,
    ColorSpace.LUV: ColorSpace.XYZ,
}

_EDGES = {
    (ColorSpace.SRGB8, ColorSpace.LINEAR_RGB): lambda c, wp: srgb_to_linear(c),
    (ColorSpace.LINEAR_RGB, ColorSpace.SRGB8): lambda c, wp: linear_to_srgb(c),
    (ColorSpace.LINEAR_RGB, ColorSpace.XYZ): lambda c, wp: rgb_to_xyz(c),
    (ColorSpace.XYZ, ColorSpace.LINEAR_RGB): lambda c, wp: xyz_to_rgb(c),
    (ColorSpace.XYZ, ColorSpace.LAB): xyz_to_lab,
    (ColorSpace.LAB, ColorSpace.XYZ): lab_to_xyz,
    (ColorSpace.XYZ, ColorSpace.LUV): xyz_to_luv,
    (ColorSpace.LUV, ColorSpace.XYZ): luv_to_xyz,
    (ColorSpace.SRGB8, ColorSpace.HSV): lambda c, wp: rgb_to_hsv(c),
    (ColorSpace.HSV, ColorSpace.SRGB8): lambda c, wp: hsv_to_rgb(c),
    (ColorSpace.SRGB8, ColorSpace.HSL): lambda c, wp: rgb_to_hsl(c),
    (ColorSpace.HSL, ColorSpace.SRGB8): lambda c, wp: hsl_to_rgb(c),
}


def _tree_path(src: ColorSpace, dst: ColorSpace) -> list[tuple[ColorSpace, ColorSpace]]:
    def to_root(space):
        chain = [space]
        while space in _PARENT:
            space = _PARENT[space]
            chain.append(space)
        return chain

    up = to_root(src)
    down = to_root(dst)
    common = next(s for s in up if s in down)
    hops = up[: up.index(common)] + [common]
    tail = down[: down.index(common)]
    nodes = hops + list(reversed(tail))
    return list(zip(nodes[:-1], nodes[1:]))


def convert(color: Color, target: ColorSpace | str, wp: WhitePoint = D65) -> Color:
    """Convert a color value to the target space (identity when already there)."""
    target = ColorSpace(target)
    current = space_of(color)
    for edge in _tree_path(current, target):
        color = _EDGES[edge](color, wp)
    return color


# --- parsing / formatting -------------------------------------------------

_HEX_RE = re.compile(r"^#([0-9a-fA-F]{6})$")
_TRIPLE_RE = re.compile(r"^\s*(\d{1,3})\s*,\s*(\d{1,3})\s*,\s*(\d{1,3})\s*$")


def parse_color(text: str) -> Srgb8:
    """Parse `#RRGGBB` (case-insensitive) or a decimal triple `r,g,b`."""
    m = _HEX_RE.match(text.strip())
    if m:
        digits = m.group(1)
        return Srgb8(int(digits[0:2], 16), int(digits[2:4], 16), int(digits[4:6], 16))
    m = _TRIPLE_RE.match(text)
    if m:
        r, g, b = (int(v) for v in m.groups())
        if max(r, g, b) > 255:
            raise ValueError(f"channel out of range in {text!r}")
        return Srgb8(r, g, b)
    raise ValueError(f"cannot parse color {text!r}: expected #RRGGBB or r,g,b")


def format_hex(c: Srgb8) -> str:
    return f"#{c.r:02X}{c.g:02X}{c.b:02X}"


def format_decimal(c: Srgb8) -> str:
    return f"{c.r},{c.g},{c.b}"


# --- vectorized conversions -----------------------------------------------
#
# Array counterparts operate on float64 arrays of shape (..., 3) holding the
# same native units as the scalar types (SRGB8 as 0..255 values). They avoid
# BLAS matmul so results are bit-identical regardless of thread count.


def _decode_arr(a: np.ndarray) -> np.ndarray:
    c = a / 255.0
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def _encode_arr(a: np.ndarray) -> np.ndarray:
    c = np.clip(a, 0.0, 1.0)
    enc = np.where(c <= 0.0031308, 12.92 * c, 1.055 * c ** (1.0 / 2.4) - 0.055)
    return np.rint(enc * 255.0)


def _matvec(m: np.ndarray, a: np.ndarray) -> np.ndarray:
    out = np.empty_like(a)
    for i in range(3):
        out[..., i] = m[i, 0] * a[..., 0] + m[i, 1] * a[..., 1] + m[i, 2] * a[..., 2]
    return out


def _lab_f_arr(t: np.ndarray) -> np.ndarray:
    return np.where(t > _DELTA3, np.cbrt(t), _LINEAR_SLOPE * t + 4.0 / 29.0)


def _lab_f_inv_arr(u: np.ndarray) -> np.ndarray:
    return np.where(u > _DELTA, u**3, (u - 4.0 / 29.0) / _LINEAR_SLOPE)


def _xyz_to_lab_arr(a: np.ndarray, wp: WhitePoint) -> np.ndarray:
    fx = _lab_f_arr(a[..., 0] / wp.xn)
    fy = _lab_f_arr(a[..., 1] / wp.yn)
    fz = _lab_f_arr(a[..., 2] / wp.zn)
    return np.stack([116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)], axis=-1)


def _lab_to_xyz_arr(a: np.ndarray, wp: WhitePoint) -> np.ndarray:
    fy = (a[..., 0] + 16.0) / 116.0
    fx = fy + a[..., 1] / 500.0
    fz = fy - a[..., 2] / 200.0
    return np.stack(
        [wp.xn * _lab_f_inv_arr(fx), wp.yn * _lab_f_inv_arr(fy), wp.zn * _lab_f_inv_arr(fz)],
        axis=-1,
    )


def _xyz_to_luv_arr(a: np.ndarray, wp: WhitePoint) -> np.ndarray:
    x, y, z = a[..., 0], a[..., 1], a[..., 2]
    den = x + 15.0 * y + 3.0 * z
    black = den == 0.0
    if np.any(black & ((x != 0.0) | (y != 0.0) | (z != 0.0))):
        raise ValueError("degenerate XYZ for Luv: x + 15y + 3z = 0 for a non-black color")
    safe = np.where(black, 1.0, den)
    up = 4.0 * x / safe
    vp = 9.0 * y / safe
    upn, vpn = _uv_prime(*wp)
    l = 116.0 * _lab_f_arr(y / wp.yn) - 16.0
    u = 13.0 * l * (up - upn)
    v = 13.0 * l * (vp - vpn)
    zero = np.zeros_like(l)
    return np.stack(
        [np.where(black, zero, l), np.where(black, zero, u), np.where(black, zero, v)],
        axis=-1,
    )


def _luv_to_xyz_arr(a: np.ndarray, wp: WhitePoint) -> np.ndarray:
    l, u, v = a[..., 0], a[..., 1], a[..., 2]
    upn, vpn = _uv_prime(*wp)
    dark = l == 0.0
    lsafe = np.where(dark, 1.0, l)
    up = u / (13.0 * lsafe) + upn
    vp = v / (13.0 * lsafe) + vpn
    y = wp.yn * _lab_f_inv_arr((l + 16.0) / 116.0)
    x = y * 9.0 * up / (4.0 * vp)
    z = y * (12.0 - 3.0 * up - 20.0 * vp) / (4.0 * vp)
    zero = np.zeros_like(l)
    return np.stack(
        [np.where(dark, zero, x), np.where(dark, zero, y), np.where(dark, zero, z)],
        axis=-1,
    )


def _hue_arr(r, g, b, mx, d):
    with np.errstate(invalid="ignore", divide="ignore"):
        hr = 60.0 * (((g - b) / d) % 6.0)
        hg = 60.0 * ((b - r) / d + 2.0)
        hb = 60.0 * ((r - g) / d + 4.0)
    h = np.where(mx == r, hr, np.where(mx == g, hg, hb))
    return np.where(d == 0.0, 0.0, h) % 360.0


def _srgb_to_hsv_arr(a: np.ndarray) -> np.ndarray:
    c = a / 255.0
    r, g, b = c[..., 0], c[..., 1], c[..., 2]
    mx = np.max(c, axis=-1)
    mn = np.min(c, axis=-1)
    d = mx - mn
    h = _hue_arr(r, g, b, mx, d)
    s = np.where(mx == 0.0, 0.0, d / np.where(mx == 0.0, 1.0, mx))
    return np.stack([h, s, mx], axis=-1)


def _srgb_to_hsl_arr(a: np.ndarray) -> np.ndarray:
    c = a / 255.0
    r, g, b = c[..., 0], c[..., 1], c[..., 2]
    mx = np.max(c, axis=-1)
    mn = np.min(c, axis=-1)
    d = mx - mn
    h = _hue_arr(r, g, b, mx, d)
    l = (mx + mn) / 2.0
    denom = 1.0 - np.abs(2.0 * l - 1.0)
    s = np.where(d == 0.0, 0.0, d / np.where(denom == 0.0, 1.0, denom))
    return np.stack([h, s, l], axis=-1)


def _hue_chroma_to_srgb_arr(h, chroma, m):
    x = chroma * (1.0 - np.abs((h / 60.0) % 2.0 - 1.0))
    sector = (h // 60.0).astype(int) % 6
    zero = np.zeros_like(chroma)
    r1 = np.choose(sector, [chroma, x, zero, zero, x, chroma])
    g1 = np.choose(sector, [x, chroma, chroma, x, zero, zero])
    b1 = np.choose(sector, [zero, zero, x, chroma, chroma, x])
    return np.rint(np.stack([r1 + m, g1 + m, b1 + m], axis=-1) * 255.0)


def _hsv_to_srgb_arr(a: np.ndarray) -> np.ndarray:
    h = a[..., 0] % 360.0
    s, v = a[..., 1], a[..., 2]
    chroma = v * s
    return _hue_chroma_to_srgb_arr(h, chroma, v - chroma)


def _hsl_to_srgb_arr(a: np.ndarray) -> np.ndarray:
    h = a[..., 0] % 360.0
    s, l = a[..., 1], a[..., 2]
    chroma = (1.0 - np.abs(2.0 * l - 1.0)) * s
    return _hue_chroma_to_srgb_arr(h, chroma, l - chroma / 2.0)


_ARRAY_EDGES = {
    (ColorSpace.SRGB8, ColorSpace.LINEAR_RGB): lambda a, wp: _decode_arr(a),
    (ColorSpace.LINEAR_RGB, ColorSpace.SRGB8): lambda a, wp: _encode_arr(a),
    (ColorSpace.LINEAR_RGB, ColorSpace.XYZ): lambda a, wp: _matvec(RGB_TO_XYZ_MATRIX, a),
    (ColorSpace.XYZ, ColorSpace.LINEAR_RGB): lambda a, wp: _matvec(XYZ_TO_RGB_MATRIX, a),
    (ColorSpace.XYZ, ColorSpace.LAB): _xyz_to_lab_arr,
    (ColorSpace.LAB, ColorSpace.XYZ): _lab_to_xyz_arr,
    (ColorSpace.XYZ, ColorSpace.LUV): _xyz_to_luv_arr,
    (ColorSpace.LUV, ColorSpace.XYZ): _luv_to_xyz_arr,
    (ColorSpace.SRGB8, ColorSpace.HSV): lambda a, wp: _srgb_to_hsv_arr(a),
    (ColorSpace.HSV, ColorSpace.SRGB8): lambda a, wp: _hsv_to_srgb_arr(a),
    (ColorSpace.SRGB8, ColorSpace.HSL): lambda a, wp: _srgb_to_hsl_arr(a),
    (ColorSpace.HSL, ColorSpace.SRGB8): lambda a, wp: _hsl_to_srgb_arr(a),
}


def convert_array(
    arr: np.ndarray,
    src: ColorSpace | str,
    dst: ColorSpace | str,
    wp: WhitePoint = D65,
) -> np.ndarray:
    """Vectorized `convert` for arrays of shape (..., 3)."""
    src = ColorSpace(src)
    dst = ColorSpace(dst)
    out = np.asarray(arr, dtype=np.float64)
    if out.shape[-1] != 3:
        raise ValueError(f"expected (..., 3) array, got shape {out.shape}")
    for edge in _tree_path(src, dst):
        out = _ARRAY_EDGES[edge](out, wp)
    return out
