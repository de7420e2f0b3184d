"""Deterministic seasonality with calendar-aware dummy variables.

The same functional shape serves both the load seasonality and the price
seasonality: a level, a linear trend per hour, one annual harmonic
(year length fixed at 365*24 hours, no leap handling), four weekday
classes and 24 hour-of-day classes.  To keep the design full rank the
Tue/Wed/Thu class and hour 0 act as reference categories: their
coefficients are pinned to zero and the intercept absorbs them.
"""

from __future__ import annotations

import datetime as _dt
import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from .conventions import HOURS_PER_YEAR, MarketConventions
from .errors import DomainError, EstimationError, ParseError

_TWO_PI = 2.0 * np.pi


class WeekdayClass(enum.IntEnum):
    MON_FRI = 0
    TUE_WED_THU = 1          # reference class, coefficient 0
    SAT_BRIDGE_PARTIAL = 2
    SUN_HOLIDAY = 3


@dataclass(frozen=True)
class Calendar:
    """Holiday, partial-holiday and bridge-day dates (pairwise disjoint)."""

    holidays: frozenset = frozenset()
    partial_holidays: frozenset = frozenset()
    bridge_days: frozenset = frozenset()

    def __post_init__(self):
        overlap = (self.holidays & self.partial_holidays) | (
            self.holidays & self.bridge_days) | (self.partial_holidays & self.bridge_days)
        if overlap:
            raise DomainError(f"calendar classes must be disjoint, shared dates: {sorted(overlap)}")


def weekday_class(date: _dt.date, cal: Calendar) -> WeekdayClass:
    """Classify a date; holiday membership takes precedence over the weekday."""
    if date in cal.holidays or date.weekday() == 6:
        return WeekdayClass.SUN_HOLIDAY
    if date in cal.partial_holidays or date in cal.bridge_days or date.weekday() == 5:
        return WeekdayClass.SAT_BRIDGE_PARTIAL
    if date.weekday() in (0, 4):
        return WeekdayClass.MON_FRI
    return WeekdayClass.TUE_WED_THU


# design columns: 4 base terms, 3 weekday dummies, 23 hour dummies
COLUMN_NAMES = (
    "level", "trend", "sin_annual", "cos_annual",
    "dow_mon_fri", "dow_sat_bridge_partial", "dow_sun_holiday",
    *[f"hod_{h:02d}" for h in range(1, 24)],
)
N_COLUMNS = len(COLUMN_NAMES)

_DOW_DUMMY_SLOT = {
    WeekdayClass.MON_FRI: 4,
    WeekdayClass.SAT_BRIDGE_PARTIAL: 5,
    WeekdayClass.SUN_HOLIDAY: 6,
}


def _day_and_hour(taus: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    whole = np.floor(taus).astype(np.int64)
    return whole // 24, whole % 24


def _classify_days(day_indices: np.ndarray, epoch: _dt.date, cal: Calendar) -> np.ndarray:
    classes = np.empty(day_indices.size, dtype=np.int64)
    cache: dict[int, int] = {}
    for k, d in enumerate(day_indices):
        d = int(d)
        cls = cache.get(d)
        if cls is None:
            cls = int(weekday_class(epoch + _dt.timedelta(days=d), cal))
            cache[d] = cls
        classes[k] = cls
    return classes


def design_matrix(taus, epoch: _dt.date, cal: Calendar) -> np.ndarray:
    """Design rows for a vector of times (hours since midnight of ``epoch``)."""
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    if np.any(taus < 0):
        raise DomainError("seasonality is defined for tau >= 0 only")
    days, hours = _day_and_hour(taus)
    classes = _classify_days(days, epoch, cal)

    X = np.zeros((taus.size, N_COLUMNS))
    X[:, 0] = 1.0
    X[:, 1] = taus
    X[:, 2] = np.sin(_TWO_PI * taus / HOURS_PER_YEAR)
    X[:, 3] = np.cos(_TWO_PI * taus / HOURS_PER_YEAR)
    for cls, slot in _DOW_DUMMY_SLOT.items():
        X[classes == int(cls), slot] = 1.0
    rows = np.flatnonzero(hours > 0)
    X[rows, 6 + hours[rows]] = 1.0
    return X


def design_row(tau: float, epoch: _dt.date, cal: Calendar) -> np.ndarray:
    """Coefficient vector multiplying the model parameters at time ``tau``."""
    return design_matrix([tau], epoch, cal)[0]


@dataclass(frozen=True)
class SeasonalityModel:
    """Fitted (or constructed) seasonal shape evaluable at any ``tau >= 0``.

    ``dow_weights`` has one entry per ``WeekdayClass`` with the
    Tue/Wed/Thu entry zero; ``hod_weights`` has 24 entries with hour 0
    zero.
    """

    level: float
    trend: float
    sin_annual: float
    cos_annual: float
    dow_weights: np.ndarray
    hod_weights: np.ndarray
    calendar: Calendar
    epoch: _dt.date

    def __post_init__(self):
        dow = np.asarray(self.dow_weights, dtype=float)
        hod = np.asarray(self.hod_weights, dtype=float)
        if dow.shape != (4,):
            raise DomainError("dow_weights must have one entry per weekday class")
        if hod.shape != (24,):
            raise DomainError("hod_weights must have one entry per hour of day")
        if dow[WeekdayClass.TUE_WED_THU] != 0.0:
            raise DomainError("the Tue/Wed/Thu weekday coefficient is the reference and must be 0")
        if hod[0] != 0.0:
            raise DomainError("the hour-0 coefficient is the reference and must be 0")
        if not np.all(np.isfinite(dow)) or not np.all(np.isfinite(hod)):
            raise DomainError("seasonality coefficients must be finite")
        object.__setattr__(self, "dow_weights", dow)
        object.__setattr__(self, "hod_weights", hod)

    @classmethod
    def constant(cls, level: float, epoch: _dt.date | None = None,
                 cal: Calendar | None = None) -> "SeasonalityModel":
        return cls(level=level, trend=0.0, sin_annual=0.0, cos_annual=0.0,
                   dow_weights=np.zeros(4), hod_weights=np.zeros(24),
                   calendar=cal or Calendar(), epoch=epoch or _dt.date(2015, 1, 1))

    def coefficients(self) -> np.ndarray:
        """Parameters in design-column order."""
        beta = np.empty(N_COLUMNS)
        beta[0:4] = (self.level, self.trend, self.sin_annual, self.cos_annual)
        for cls, slot in _DOW_DUMMY_SLOT.items():
            beta[slot] = self.dow_weights[int(cls)]
        beta[7:] = self.hod_weights[1:]
        return beta

    def with_trend(self, trend: float) -> "SeasonalityModel":
        return SeasonalityModel(self.level, trend, self.sin_annual, self.cos_annual,
                                self.dow_weights, self.hod_weights, self.calendar, self.epoch)


def _from_coefficients(beta: np.ndarray, cal: Calendar, epoch: _dt.date) -> SeasonalityModel:
    dow = np.zeros(4)
    for cls, slot in _DOW_DUMMY_SLOT.items():
        dow[int(cls)] = beta[slot]
    hod = np.zeros(24)
    hod[1:] = beta[7:]
    return SeasonalityModel(level=float(beta[0]), trend=float(beta[1]),
                            sin_annual=float(beta[2]), cos_annual=float(beta[3]),
                            dow_weights=dow, hod_weights=hod, calendar=cal, epoch=epoch)


def evaluate(model: SeasonalityModel, tau):
    """Seasonal value at ``tau`` (scalar or array of hours since epoch)."""
    taus = np.asarray(tau, dtype=float)
    scalar = taus.ndim == 0
    taus = np.atleast_1d(taus)
    if np.any(taus < 0):
        raise DomainError("seasonality is defined for tau >= 0 only")
    days, hours = _day_and_hour(taus)
    classes = _classify_days(days, model.epoch, model.calendar)
    out = (model.level
           + model.trend * taus
           + model.sin_annual * np.sin(_TWO_PI * taus / HOURS_PER_YEAR)
           + model.cos_annual * np.cos(_TWO_PI * taus / HOURS_PER_YEAR)
           + model.dow_weights[classes]
           + model.hod_weights[hours])
    return float(out[0]) if scalar else out


def fit(taus, values, cal: Calendar, epoch: _dt.date) -> SeasonalityModel:
    """Ordinary least squares fit of the seasonal shape to (tau, value) pairs.

    Uses an SVD-based solve; a rank-deficient design raises an
    estimation error naming the collinear columns.
    """
    taus = np.asarray(taus, dtype=float)
    values = np.asarray(values, dtype=float)
    if taus.shape != values.shape or taus.ndim != 1:
        raise DomainError("taus and values must be 1-d arrays of equal length")
    if taus.size < N_COLUMNS:
        raise EstimationError(
            f"need at least {N_COLUMNS} observations to fit the seasonal shape, got {taus.size}")
    X = design_matrix(taus, epoch, cal)
    beta, _, rank, _ = np.linalg.lstsq(X, values, rcond=None)
    if rank < N_COLUMNS:
        _, R, piv = scipy.linalg.qr(X, mode="economic", pivoting=True)
        diag = np.abs(np.diag(R))
        tol = diag.max() * max(X.shape) * np.finfo(float).eps
        bad = sorted(COLUMN_NAMES[piv[k]] for k in range(len(diag)) if diag[k] <= tol)
        raise EstimationError(f"rank-deficient design (rank {rank} < {N_COLUMNS}); "
                              f"collinear columns: {', '.join(bad)}")
    return _from_coefficients(beta, cal, epoch)


def price_seasonality_target(day_ahead, intraday, conv: MarketConventions) -> np.ndarray:
    """Per-hour mixture of the two spot series whose seasonal fit approximates
    the seasonality of the settlement price: ``(I + S) / (1 + e^{-r_h delta})``."""
    day_ahead = np.asarray(day_ahead, dtype=float)
    intraday = np.asarray(intraday, dtype=float)
    if day_ahead.shape != intraday.shape:
        raise DomainError(
            f"misaligned series: day-ahead {day_ahead.shape} vs intraday {intraday.shape}")
    return (intraday + day_ahead) / (1.0 + np.exp(-conv.hourly_rate * conv.delta))


_CALENDAR_TAGS = {"holiday": "holidays", "partial": "partial_holidays", "bridge": "bridge_days"}


def load_calendar(path) -> Calendar:
    """Read a calendar file: one ISO-8601 date per line followed by a tag
    in {holiday, partial, bridge}; ``#`` starts a comment."""
    sets: dict[str, set] = {name: set() for name in _CALENDAR_TAGS.values()}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or parts[1] not in _CALENDAR_TAGS:
            raise ParseError(f"{path}:{lineno}: expected '<ISO date> holiday|partial|bridge', "
                             f"got {raw!r}")
        try:
            date = _dt.date.fromisoformat(parts[0])
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: invalid date {parts[0]!r}") from exc
        sets[_CALENDAR_TAGS[parts[1]]].add(date)
    return Calendar(holidays=frozenset(sets["holidays"]),
                    partial_holidays=frozenset(sets["partial_holidays"]),
                    bridge_days=frozenset(sets["bridge_days"]))
