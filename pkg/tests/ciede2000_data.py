"""Published CIEDE2000 test vectors and an independent reference computation.

The 34 pairs and expected values come from the supplementary test data of
Sharma, Wu & Dalal (Color Research & Application, 2005), the standard
conformance set for CIEDE2000 implementations. `reference_de00` recomputes
the formula step by step, straight from the CIE procedure, as a second
route that stays independent of the package implementation; it reproduces
every published value to better than 1e-4.
"""

import math

# L1, a1, b1, L2, a2, b2, expected dE00
# fmt: off
PAIRS = [
    (50.0000,   2.6772, -79.7751, 50.0000,   0.0000, -82.7485,  2.0425),
    (50.0000,   3.1571, -77.2803, 50.0000,   0.0000, -82.7485,  2.8615),
    (50.0000,   2.8361, -74.0200, 50.0000,   0.0000, -82.7485,  3.4412),
    (50.0000,  -1.3802, -84.2814, 50.0000,   0.0000, -82.7485,  1.0000),
    (50.0000,  -1.1848, -84.8006, 50.0000,   0.0000, -82.7485,  1.0000),
    (50.0000,  -0.9009, -85.5211, 50.0000,   0.0000, -82.7485,  1.0000),
    (50.0000,   0.0000,   0.0000, 50.0000,  -1.0000,   2.0000,  2.3669),
    (50.0000,  -1.0000,   2.0000, 50.0000,   0.0000,   0.0000,  2.3669),
    (50.0000,   2.4900,  -0.0010, 50.0000,  -2.4900,   0.0009,  7.1792),
    (50.0000,   2.4900,  -0.0010, 50.0000,  -2.4900,   0.0010,  7.1792),
    (50.0000,   2.4900,  -0.0010, 50.0000,  -2.4900,   0.0011,  7.2195),
    (50.0000,   2.4900,  -0.0010, 50.0000,  -2.4900,   0.0012,  7.2195),
    (50.0000,  -0.0010,   2.4900, 50.0000,   0.0009,  -2.4900,  4.8045),
    (50.0000,  -0.0010,   2.4900, 50.0000,   0.0010,  -2.4900,  4.8045),
    (50.0000,  -0.0010,   2.4900, 50.0000,   0.0011,  -2.4900,  4.7461),
    (50.0000,   2.5000,   0.0000, 50.0000,   0.0000,  -2.5000,  4.3065),
    (50.0000,   2.5000,   0.0000, 73.0000,  25.0000, -18.0000, 27.1492),
    (50.0000,   2.5000,   0.0000, 61.0000,  -5.0000,  29.0000, 22.8977),
    (50.0000,   2.5000,   0.0000, 56.0000, -27.0000,  -3.0000, 31.9030),
    (50.0000,   2.5000,   0.0000, 58.0000,  24.0000,  15.0000, 19.4535),
    (50.0000,   2.5000,   0.0000, 50.0000,   3.1736,   0.5854,  1.0000),
    (50.0000,   2.5000,   0.0000, 50.0000,   3.2972,   0.0000,  1.0000),
    (50.0000,   2.5000,   0.0000, 50.0000,   1.8634,   0.5757,  1.0000),
    (50.0000,   2.5000,   0.0000, 50.0000,   3.2592,   0.3350,  1.0000),
    (60.2574, -34.0099,  36.2677, 60.4626, -34.1751,  39.4387,  1.2644),
    (63.0109, -31.0961,  -5.8663, 62.8187, -29.7946,  -4.0864,  1.2630),
    (61.2901,   3.7196,  -5.3901, 61.4292,   2.2480,  -4.9620,  1.8731),
    (35.0831, -44.1164,   3.7933, 35.0232, -40.0716,   1.5901,  1.8645),
    (22.7233,  20.0904, -46.6940, 23.0331,  14.9730, -42.5619,  2.0373),
    (36.4612,  47.8580,  18.3852, 36.2715,  50.5065,  21.2231,  1.4146),
    (90.8027,  -2.0831,   1.4410, 91.1528,  -1.6435,   0.0447,  1.4441),
    (90.9257,  -0.5406,  -0.9208, 88.6381,  -0.8985,  -0.7239,  1.5381),
    ( 6.7747,  -0.2908,  -2.4247,  5.8714,  -0.0985,  -2.2286,  0.6377),
    ( 2.0776,   0.0795,  -1.1350,  0.9033,  -0.0636,  -0.5514,  0.9082),
]
# fmt: on


def reference_de00(L1, a1, b1, L2, a2, b2, kL=1.0, kC=1.0, kH=1.0):
    """Step-by-step CIEDE2000 in degrees, following the CIE procedure."""
    C1ab = math.sqrt(a1 * a1 + b1 * b1)
    C2ab = math.sqrt(a2 * a2 + b2 * b2)
    Cab_mean = (C1ab + C2ab) / 2.0
    G = 0.5 * (1.0 - math.sqrt(Cab_mean**7 / (Cab_mean**7 + 25.0**7)))
    a1p = (1.0 + G) * a1
    a2p = (1.0 + G) * a2
    C1p = math.sqrt(a1p * a1p + b1 * b1)
    C2p = math.sqrt(a2p * a2p + b2 * b2)

    def hp(ap, b):
        if ap == 0.0 and b == 0.0:
            return 0.0
        h = math.degrees(math.atan2(b, ap))
        return h + 360.0 if h < 0.0 else h

    h1p = hp(a1p, b1)
    h2p = hp(a2p, b2)

    dLp = L2 - L1
    dCp = C2p - C1p
    if C1p * C2p == 0.0:
        dhp = 0.0
    else:
        dhp = h2p - h1p
        if dhp > 180.0:
            dhp -= 360.0
        elif dhp < -180.0:
            dhp += 360.0
    dHp = 2.0 * math.sqrt(C1p * C2p) * math.sin(math.radians(dhp) / 2.0)

    Lp_mean = (L1 + L2) / 2.0
    Cp_mean = (C1p + C2p) / 2.0
    if C1p * C2p == 0.0:
        hp_mean = h1p + h2p
    else:
        hsum = h1p + h2p
        if abs(h1p - h2p) <= 180.0:
            hp_mean = hsum / 2.0
        elif hsum < 360.0:
            hp_mean = (hsum + 360.0) / 2.0
        else:
            hp_mean = (hsum - 360.0) / 2.0

    T = (1.0
         - 0.17 * math.cos(math.radians(hp_mean - 30.0))
         + 0.24 * math.cos(math.radians(2.0 * hp_mean))
         + 0.32 * math.cos(math.radians(3.0 * hp_mean + 6.0))
         - 0.20 * math.cos(math.radians(4.0 * hp_mean - 63.0)))
    dTheta = 30.0 * math.exp(-(((hp_mean - 275.0) / 25.0) ** 2))
    RC = 2.0 * math.sqrt(Cp_mean**7 / (Cp_mean**7 + 25.0**7))
    SL = 1.0 + (0.015 * (Lp_mean - 50.0) ** 2) / math.sqrt(20.0 + (Lp_mean - 50.0) ** 2)
    SC = 1.0 + 0.045 * Cp_mean
    SH = 1.0 + 0.015 * Cp_mean * T
    RT = -math.sin(math.radians(2.0 * dTheta)) * RC

    tL = dLp / (kL * SL)
    tC = dCp / (kC * SC)
    tH = dHp / (kH * SH)
    return math.sqrt(tL * tL + tC * tC + tH * tH + RT * tC * tH)
