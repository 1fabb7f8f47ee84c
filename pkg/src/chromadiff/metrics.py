"""Color-difference formulas behind a uniform registry.

Covers the classic CIE Lab formulas (CIE76, CIE94, CIEDE2000, CMC l:c),
Euclidean distances in RGB / XYZ / Luv, the "redmean" weighted RGB
approximation, and chord distances in the HSV / HSL cylinders. Every metric
is reachable by a stable lowercase id through `evaluate`, which converts
8-bit sRGB endpoints into the metric's working space first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .colors import (
    D65,
    ColorSpace,
    Hsl,
    Hsv,
    Lab,
    Luv,
    Srgb8,
    WhitePoint,
    convert,
)


@dataclass(frozen=True)
class Ciede2000Params:
    """Parametric k factors; (1, 1, 1) is the reference condition."""

    k_l: float = 1.0
    k_c: float = 1.0
    k_h: float = 1.0

    def __post_init__(self):
        if min(self.k_l, self.k_c, self.k_h) <= 0:
            raise ValueError("CIEDE2000 k factors must be positive")


@dataclass(frozen=True)
class Ciede2000Terms:
    """Intermediate quantities of the CIEDE2000 computation."""

    dl_prime: float
    dc_prime: float
    dh_prime: float
    r_t: float
    s_l: float
    s_c: float
    s_h: float


@dataclass(frozen=True)
class CmcParams:
    """CMC lightness:chroma ratio; the common choices are 1:1 and 2:1."""

    l: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        if self.l <= 0 or self.c <= 0:
            raise ValueError("CMC l and c must be positive")


def delta_e76(a: Lab, b: Lab) -> float:
    """CIE 1976 delta E: Euclidean distance in Lab."""
    return math.sqrt((b.l - a.l) ** 2 + (b.a - a.a) ** 2 + (b.b - a.b) ** 2)


_POW7_25 = 25.0**7


def _ciede2000(a: Lab, b: Lab, p: Ciede2000Params) -> tuple[float, Ciede2000Terms]:
    # CIE standard formulation: chroma-dependent a-axis rescaling, then
    # arithmetic means of L', C', h' feed the weighting functions.
    c_ab_1 = math.hypot(a.a, a.b)
    c_ab_2 = math.hypot(b.a, b.b)
    c_ab_mean7 = ((c_ab_1 + c_ab_2) / 2.0) ** 7
    g = 0.5 * (1.0 - math.sqrt(c_ab_mean7 / (c_ab_mean7 + _POW7_25)))

    a1p, a2p = (1.0 + g) * a.a, (1.0 + g) * b.a
    c1p = math.hypot(a1p, a.b)
    c2p = math.hypot(a2p, b.b)
    h1p = _hue_angle(a1p, a.b)
    h2p = _hue_angle(a2p, b.b)

    dl = b.l - a.l
    dc = c2p - c1p
    if c1p * c2p == 0.0:
        dh_small = 0.0
    else:
        dh_small = h2p - h1p
        if dh_small > 180.0:
            dh_small -= 360.0
        elif dh_small < -180.0:
            dh_small += 360.0
    dh = 2.0 * math.sqrt(c1p * c2p) * math.sin(math.radians(dh_small) / 2.0)

    l_mean = (a.l + b.l) / 2.0
    c_mean = (c1p + c2p) / 2.0
    if c1p * c2p == 0.0:
        h_mean = h1p + h2p
    elif abs(h1p - h2p) <= 180.0:
        h_mean = (h1p + h2p) / 2.0
    elif h1p + h2p < 360.0:
        h_mean = (h1p + h2p + 360.0) / 2.0
    else:
        h_mean = (h1p + h2p - 360.0) / 2.0

    t = (
        1.0
        - 0.17 * math.cos(math.radians(h_mean - 30.0))
        + 0.24 * math.cos(math.radians(2.0 * h_mean))
        + 0.32 * math.cos(math.radians(3.0 * h_mean + 6.0))
        - 0.20 * math.cos(math.radians(4.0 * h_mean - 63.0))
    )
    l_off = (l_mean - 50.0) ** 2
    s_l = 1.0 + 0.015 * l_off / math.sqrt(20.0 + l_off)
    s_c = 1.0 + 0.045 * c_mean
    s_h = 1.0 + 0.015 * c_mean * t
    c_mean7 = c_mean**7
    r_t = (
        -2.0
        * math.sqrt(c_mean7 / (c_mean7 + _POW7_25))
        * math.sin(math.radians(60.0 * math.exp(-(((h_mean - 275.0) / 25.0) ** 2))))
    )

    terms = Ciede2000Terms(dl, dc, dh, r_t, s_l, s_c, s_h)
    vl = dl / (p.k_l * s_l)
    vc = dc / (p.k_c * s_c)
    vh = dh / (p.k_h * s_h)
    return math.sqrt(vl * vl + vc * vc + vh * vh + r_t * vc * vh), terms


def _hue_angle(ap: float, b: float) -> float:
    if ap == 0.0 and b == 0.0:
        return 0.0
    return math.degrees(math.atan2(b, ap)) % 360.0


def delta_e2000(a: Lab, b: Lab, params: Ciede2000Params = Ciede2000Params()) -> float:
    """CIEDE2000 delta E (symmetric; zero iff the inputs are identical)."""
    return _ciede2000(a, b, params)[0]


def ciede2000_terms(a: Lab, b: Lab, params: Ciede2000Params = Ciede2000Params()) -> Ciede2000Terms:
    """Expose the CIEDE2000 intermediates for inspection and testing."""
    return _ciede2000(a, b, params)[1]


def delta_e94(reference: Lab, sample: Lab, k_l: float = 1.0,
              k1: float = 0.045, k2: float = 0.015) -> float:
    """CIE94 with graphic-arts constants; asymmetric (reference-first)."""
    c1 = math.hypot(reference.a, reference.b)
    c2 = math.hypot(sample.a, sample.b)
    dl = reference.l - sample.l
    dc = c1 - c2
    # dH^2 recovered from the Lab distances; clip tiny negatives from rounding.
    dh2 = max((reference.a - sample.a) ** 2 + (reference.b - sample.b) ** 2 - dc * dc, 0.0)
    s_c = 1.0 + k1 * c1
    s_h = 1.0 + k2 * c1
    return math.sqrt((dl / k_l) ** 2 + (dc / s_c) ** 2 + dh2 / (s_h * s_h))


def delta_cmc(reference: Lab, sample: Lab, params: CmcParams = CmcParams()) -> float:
    """CMC(l:c) 1984; asymmetric (reference-first).

    http://www.brucelindbloom.com/Eqn_DeltaE_CMC.html
    """
    c1 = math.hypot(reference.a, reference.b)
    c2 = math.hypot(sample.a, sample.b)
    dl = reference.l - sample.l
    dc = c1 - c2
    dh2 = max((reference.a - sample.a) ** 2 + (reference.b - sample.b) ** 2 - dc * dc, 0.0)

    if reference.l < 16.0:
        s_l = 0.511
    else:
        s_l = 0.040975 * reference.l / (1.0 + 0.01765 * reference.l)
    s_c = 0.0638 * c1 / (1.0 + 0.0131 * c1) + 0.638

    h1 = _hue_angle(reference.a, reference.b)
    if 164.0 <= h1 <= 345.0:
        t = 0.56 + abs(0.2 * math.cos(math.radians(h1 + 168.0)))
    else:
        t = 0.36 + abs(0.4 * math.cos(math.radians(h1 + 35.0)))
    c1_4 = c1**4
    f = math.sqrt(c1_4 / (c1_4 + 1900.0))
    s_h = s_c * (f * t + 1.0 - f)

    return math.sqrt(
        (dl / (params.l * s_l)) ** 2 + (dc / (params.c * s_c)) ** 2 + dh2 / (s_h * s_h)
    )


def euclidean_rgb(a: Srgb8, b: Srgb8) -> float:
    """Euclidean distance on raw 8-bit channels; range [0, 255*sqrt(3)]."""
    return math.sqrt((a.r - b.r) ** 2 + (a.g - b.g) ** 2 + (a.b - b.b) ** 2)


def weighted_rgb(a: Srgb8, b: Srgb8) -> float:
    """Low-cost "redmean" weighted RGB distance.

    https://www.compuphase.com/cmetric.htm
    """
    rbar = (a.r + b.r) / 2.0
    dr, dg, db = a.r - b.r, a.g - b.g, a.b - b.b
    return math.sqrt(
        (2.0 + rbar / 256.0) * dr * dr
        + 4.0 * dg * dg
        + (2.0 + (255.0 - rbar) / 256.0) * db * db
    )


def cylindrical_distance(a: Hsv | Hsl, b: Hsv | Hsl) -> float:
    """Chord distance in the HSV/HSL cylinder with unit-scaled channels.

    Hue enters only through (s cos h, s sin h), so the distance is invariant
    under a global hue rotation and achromatic points collapse to the axis.
    """
    if type(a) is not type(b):
        raise ValueError(
            f"mixed cylindrical models: {type(a).__name__} vs {type(b).__name__}"
        )
    ha, hb = math.radians(a[0]), math.radians(b[0])
    dx = a[1] * math.cos(ha) - b[1] * math.cos(hb)
    dy = a[1] * math.sin(ha) - b[1] * math.sin(hb)
    dz = a[2] - b[2]
    return math.sqrt(dx * dx + dy * dy + dz * dz)


def delta_e_luv(a: Luv, b: Luv) -> float:
    """CIE 1976 delta E*uv: Euclidean distance in Luv."""
    return math.sqrt((b.l - a.l) ** 2 + (b.u - a.u) ** 2 + (b.v - a.v) ** 2)


def delta_cmc_luv(reference: Luv, sample: Luv, params: CmcParams = CmcParams()) -> float:
    """CMC-style weighting applied to Luv coordinates.

    Non-standard variant (CMC is defined on Lab); provided for comparison
    only and not registered by default.
    """
    return delta_cmc(Lab(*reference), Lab(*sample), params)


def _xyz_euclid(a, b) -> float:
    # Conventional 0-100 XYZ scale, so magnitudes read like percent units.
    return 100.0 * math.sqrt((a.x - b.x) ** 2 + (a.y - b.y) ** 2 + (a.z - b.z) ** 2)


@dataclass(frozen=True)
class MetricDescriptor:
    """A named distance function with its working space and parameters."""

    id: str
    working_space: ColorSpace
    fn: Callable
    symmetric: bool
    params: dict = field(default_factory=dict)


_REGISTRY: dict[str, MetricDescriptor] = {}


def _register(desc: MetricDescriptor) -> None:
    if desc.id in _REGISTRY:
        raise ValueError(f"duplicate metric id {desc.id!r}")
    _REGISTRY[desc.id] = desc


_register(MetricDescriptor("euclid_rgb", ColorSpace.SRGB8, euclidean_rgb, symmetric=True))
_register(MetricDescriptor("w_rgb", ColorSpace.SRGB8, weighted_rgb, symmetric=True))
_register(MetricDescriptor(
    "lab_cie2000", ColorSpace.LAB, delta_e2000, symmetric=True,
    params={"k_l": 1.0, "k_c": 1.0, "k_h": 1.0},
))
_register(MetricDescriptor(
    "lab_cmc", ColorSpace.LAB, delta_cmc, symmetric=False, params={"l": 1.0, "c": 1.0},
))
_register(MetricDescriptor("hsv_cyl", ColorSpace.HSV, cylindrical_distance, symmetric=True))
_register(MetricDescriptor("hsl_cyl", ColorSpace.HSL, cylindrical_distance, symmetric=True))
_register(MetricDescriptor("xyz_euclid", ColorSpace.XYZ, _xyz_euclid, symmetric=True))
_register(MetricDescriptor("luv_dist", ColorSpace.LUV, delta_e_luv, symmetric=True))
_register(MetricDescriptor("lab_cie76", ColorSpace.LAB, delta_e76, symmetric=True))
_register(MetricDescriptor(
    "lab_cie94", ColorSpace.LAB, delta_e94, symmetric=False,
    params={"k_l": 1.0, "k1": 0.045, "k2": 0.015},
))

# The eight distance columns of the reference study, in column order.
TABLE_METRICS = (
    "euclid_rgb", "w_rgb", "lab_cie2000", "lab_cmc",
    "hsv_cyl", "hsl_cyl", "xyz_euclid", "luv_dist",
)


def available_metrics() -> tuple[str, ...]:
    return tuple(_REGISTRY)


def registry_lookup(metric_id: str) -> MetricDescriptor:
    """Look up a metric by id; unknown ids list the registry contents."""
    try:
        return _REGISTRY[metric_id]
    except KeyError:
        known = ", ".join(sorted(_REGISTRY))
        raise KeyError(f"unknown metric {metric_id!r}; available: {known}") from None


def evaluate(metric: str | MetricDescriptor, a: Srgb8, b: Srgb8,
             wp: WhitePoint = D65) -> float:
    """Distance between two 8-bit sRGB colors under the named metric."""
    desc = metric if isinstance(metric, MetricDescriptor) else registry_lookup(metric)
    ca = convert(a, desc.working_space, wp)
    cb = convert(b, desc.working_space, wp)
    return desc.fn(ca, cb)
