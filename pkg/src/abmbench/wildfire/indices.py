"""Canadian Forest Fire Weather Index blocks (Van Wagner 1987 daily forms).

Every block accepts scalars or numpy arrays and broadcasts.  Scalars in,
plain floats out.

Several constants here differ from commonly circulated transcriptions of
the system; the values used are the ones in the original Fortran program:

* DMC rain branch: ``b = 100 / (0.5 + 0.3 Po)`` (the denominator is one
  term) and ``b = 14 - 1.3 ln Po`` for 33 < Po <= 65.
* ISI wind function: ``f(W) = exp(0.05039 W)``.
* FWI duff function: ``f(D) = 1000 / (25 + 108.64 exp(-0.0203 U))`` above 80.
* FFMC drying/wetting rates use ``(H/100)`` and ``((100 - H)/100)``
  respectively, and the rain term is evaluated once on ``mo``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

# Effective day length (DMC) and day-length adjustment (DC), Jan..Dec,
# standard northern-hemisphere tables.
DMC_DAY_LENGTH = (6.5, 7.5, 9.0, 12.8, 13.9, 13.9, 12.4, 10.9, 9.4, 8.0, 7.0, 6.0)
DC_DAY_LENGTH = (-1.6, -1.6, -1.6, 0.9, 3.8, 5.8, 6.4, 5.0, 2.4, 0.4, -1.6, -1.6)

FFMC_START = 85.0
DMC_START = 6.0
DC_START = 15.0


def _out(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def _check(cond, message: str) -> None:
    if not np.all(cond):
        raise ValueError(message)


@dataclass(frozen=True)
class FwiInputs:
    """Noon weather for one day: temperature (C), relative humidity (%),
    wind (km/h), 24 h rain (mm) and month (1-12)."""

    T: float
    H: float
    W: float = 0.0
    r_o: float = 0.0
    month: int = 7

    def validate(self) -> None:
        H = np.asarray(self.H, dtype=float)
        _check((H >= 0) & (H <= 100), "relative humidity must lie in [0, 100]")
        _check(np.asarray(self.r_o) >= 0, "rain must be non-negative")
        _check(np.asarray(self.W) >= 0, "wind speed must be non-negative")
        m = np.asarray(self.month)
        _check((m >= 1) & (m <= 12), "month must lie in 1..12")


def ffmc(F_o, inputs: FwiInputs):
    """Fine Fuel Moisture Code from yesterday's ``F_o``."""
    inputs.validate()
    F_o = np.asarray(F_o, dtype=float)
    _check((F_o >= 0) & (F_o <= 101), "FFMC must lie in [0, 101]")
    T = np.asarray(inputs.T, dtype=float)
    H = np.asarray(inputs.H, dtype=float)
    W = np.asarray(inputs.W, dtype=float)
    ro = np.asarray(inputs.r_o, dtype=float)

    mo = 147.2 * (101.0 - F_o) / (59.5 + F_o)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        rf = np.where(ro > 0.5, ro - 0.5, 1.0)
        wet = mo + 42.5 * rf * np.exp(-100.0 / (251.0 - mo)) * (1.0 - np.exp(-6.93 / rf))
        wet = np.where(mo > 150.0, wet + 0.0015 * (mo - 150.0) ** 2 * np.sqrt(rf), wet)
    mr = np.where(ro > 0.5, np.minimum(wet, 250.0), mo)

    hum = 1.0 - np.exp(-0.115 * H)
    Ed = 0.942 * H ** 0.679 + 11.0 * np.exp((H - 100.0) / 10.0) + 0.18 * (21.1 - T) * hum
    Ew = 0.618 * H ** 0.753 + 10.0 * np.exp((H - 100.0) / 10.0) + 0.18 * (21.1 - T) * hum

    ko = 0.424 * (1.0 - (H / 100.0) ** 1.7) + 0.0694 * np.sqrt(W) * (1.0 - (H / 100.0) ** 8)
    kd = ko * 0.581 * np.exp(0.0365 * T)
    k1 = (0.424 * (1.0 - ((100.0 - H) / 100.0) ** 1.7)
          + 0.0694 * np.sqrt(W) * (1.0 - ((100.0 - H) / 100.0) ** 8))
    kw = k1 * 0.581 * np.exp(0.0365 * T)

    m = np.where(mr > Ed, Ed + (mr - Ed) * 10.0 ** (-kd),
                 np.where(mr < Ew, Ew - (Ew - mr) * 10.0 ** (-kw), mr))
    F = 59.5 * (250.0 - m) / (147.2 + m)
    return _out(np.clip(F, 0.0, 101.0))


def dmc(P_o, inputs: FwiInputs, day_length=DMC_DAY_LENGTH):
    """Duff Moisture Code from yesterday's ``P_o``."""
    inputs.validate()
    Po = np.asarray(P_o, dtype=float)
    _check(Po >= 0, "DMC must be non-negative")
    T = np.maximum(np.asarray(inputs.T, dtype=float), -1.1)
    H = np.asarray(inputs.H, dtype=float)
    ro = np.asarray(inputs.r_o, dtype=float)
    Le = np.asarray(day_length, dtype=float)[np.asarray(inputs.month) - 1]

    with np.errstate(divide="ignore", invalid="ignore"):
        re = 0.92 * ro - 1.27
        Mo = 20.0 + np.exp(5.6348 - Po / 43.43)
        safe_po = np.where(Po > 0, Po, 1.0)
        b = np.where(Po <= 33.0, 100.0 / (0.5 + 0.3 * Po),
                     np.where(Po <= 65.0, 14.0 - 1.3 * np.log(safe_po),
                              6.2 * np.log(safe_po) - 17.2))
        Mr = Mo + 1000.0 * re / (48.77 + b * re)
        Pr = np.maximum(244.72 - 43.43 * np.log(Mr - 20.0), 0.0)
    Pr = np.where(ro > 1.5, Pr, Po)

    K = 1.894 * (T + 1.1) * (100.0 - H) * Le * 1e-6
    return _out(Pr + 100.0 * K)


def dc(D_o, inputs: FwiInputs, day_length=DC_DAY_LENGTH):
    """Drought Code from yesterday's ``D_o``."""
    inputs.validate()
    Do = np.asarray(D_o, dtype=float)
    _check(Do >= 0, "DC must be non-negative")
    T = np.maximum(np.asarray(inputs.T, dtype=float), -2.8)
    ro = np.asarray(inputs.r_o, dtype=float)
    Lf = np.asarray(day_length, dtype=float)[np.asarray(inputs.month) - 1]

    rd = 0.83 * ro - 1.27
    Qo = 800.0 * np.exp(-Do / 400.0)
    Qr = Qo + 3.937 * rd
    with np.errstate(divide="ignore", invalid="ignore"):
        Dr = np.maximum(400.0 * np.log(800.0 / Qr), 0.0)
    Dr = np.where(ro > 2.8, Dr, Do)

    V = np.maximum(0.36 * (T + 2.8) + Lf, 0.0)
    return _out(Dr + 0.5 * V)


def isi(F, W):
    """Initial Spread Index from today's FFMC and wind speed."""
    F = np.asarray(F, dtype=float)
    W = np.asarray(W, dtype=float)
    m = 147.2 * (101.0 - F) / (59.5 + F)
    fW = np.exp(0.05039 * W)
    fF = 91.9 * np.exp(-0.1386 * m) * (1.0 + m ** 5.31 / 4.93e7)
    return _out(0.208 * fW * fF)


def bui(P, D):
    """Build-up Index from today's DMC and DC."""
    P = np.asarray(P, dtype=float)
    D = np.asarray(D, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        low = 0.8 * P * D / (P + 0.4 * D)
        high = P - (1.0 - 0.8 * D / (P + 0.4 * D)) * (0.92 + (0.0114 * P) ** 1.7)
    U = np.where(P <= 0.4 * D, low, high)
    U = np.where((P == 0) & (D == 0), 0.0, U)
    return _out(np.maximum(U, 0.0))


def fwi(R, U):
    """Fire Weather Index from ISI and BUI."""
    R = np.asarray(R, dtype=float)
    U = np.asarray(U, dtype=float)
    fD = np.where(U <= 80.0, 0.626 * U ** 0.809 + 2.0,
                  1000.0 / (25.0 + 108.64 * np.exp(-0.0203 * U)))
    B = 0.1 * R * fD
    with np.errstate(divide="ignore", invalid="ignore"):
        S = np.exp(2.72 * (0.434 * np.log(np.maximum(B, 1.0))) ** 0.647)
    return _out(np.where(B > 1.0, S, B))


@dataclass(frozen=True)
class FwiState:
    """Moisture codes carried between days plus the indices derived from them."""

    ffmc: float = FFMC_START
    dmc: float = DMC_START
    dc: float = DC_START
    isi: float = 0.0
    bui: float = 0.0
    fwi: float = 0.0

    def update(self, inputs: FwiInputs) -> "FwiState":
        F = ffmc(self.ffmc, inputs)
        P = dmc(self.dmc, inputs)
        D = dc(self.dc, inputs)
        R = isi(F, inputs.W)
        U = bui(P, D)
        return FwiState(F, P, D, R, U, fwi(R, U))


class Danger(enum.IntEnum):
    LOW = 0
    MODERATE = 1
    HIGH = 2
    VERY_HIGH = 3
    EXTREME = 4

    @property
    def label(self) -> str:
        return ("Low", "Moderate", "High", "Very high", "Extreme")[self]


DANGER_BOUNDS = (5.0, 10.0, 20.0, 30.0)


def classify_danger(S) -> Danger:
    """Fire danger class of an FWI value; a boundary value belongs to the upper class."""
    S = float(S)
    if not S >= 0:  # also rejects NaN
        raise ValueError(f"FWI must be non-negative, got {S}")
    return Danger(int(np.searchsorted(DANGER_BOUNDS, S, side="right")))


def danger_codes(S) -> np.ndarray:
    """Vectorized :func:`classify_danger` returning integer class codes."""
    S = np.asarray(S, dtype=float)
    if np.any(~(S >= 0)):
        raise ValueError("FWI must be non-negative")
    return np.searchsorted(DANGER_BOUNDS, S, side="right")
