"""Market conventions, delivery-time containers, and discounting.

Time is a continuous number of hours since the epoch of the data set.
Contracts are quoted for delivery periods ``[tau, tau + epsilon)``; the
quantity that settles them is only known at the ex-post time
``tau_e = tau + epsilon``.  The risk-free rate is stated per year and
converted once to an hourly rate ``r_h = annual_rate / hours_per_year``,
which is the rate used in every discount factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .errors import DomainError, ParseError

HOURS_PER_YEAR = 365 * 24


@dataclass(frozen=True)
class MarketConventions:
    """Delivery length, day length and risk-free rate shared by all contracts."""

    epsilon: float = 1.0
    delta: float = 24.0
    annual_rate: float = 0.001
    hours_per_year: float = float(HOURS_PER_YEAR)

    def __post_init__(self):
        if not self.epsilon > 0:
            raise DomainError(f"delivery length must be positive, got {self.epsilon}")
        if not self.delta > 0:
            raise DomainError(f"day length must be positive, got {self.delta}")
        if not self.hours_per_year > 0:
            raise DomainError(f"hours_per_year must be positive, got {self.hours_per_year}")
        r_h = self.annual_rate / self.hours_per_year
        if not math.isfinite(r_h) or r_h < 0:
            raise DomainError(f"hourly rate must be finite and non-negative, got {r_h}")

    @property
    def hourly_rate(self) -> float:
        return self.annual_rate / self.hours_per_year


@dataclass(frozen=True)
class DeliveryTime:
    """A single delivery hour, identified by its start ``tau`` in hours since epoch."""

    tau: float

    def __post_init__(self):
        if self.tau < 0:
            raise DomainError(f"delivery time must be non-negative, got {self.tau}")

    def ex_post(self, conv: MarketConventions) -> float:
        """Time at which the delivered quantity becomes known."""
        return self.tau + conv.epsilon


@dataclass(frozen=True)
class DeliverySet:
    """Strictly increasing delivery times backing one futures contract."""

    taus: tuple[DeliveryTime, ...]

    def __post_init__(self):
        if len(self.taus) < 1:
            raise DomainError("a delivery set needs at least one delivery time")
        values = [d.tau for d in self.taus]
        if any(b <= a for a, b in zip(values, values[1:])):
            raise DomainError(f"delivery times must be strictly increasing, got {values}")

    @classmethod
    def from_hours(cls, hours) -> "DeliverySet":
        return cls(tuple(DeliveryTime(float(h)) for h in hours))

    def __len__(self) -> int:
        return len(self.taus)

    def hours(self) -> list[float]:
        return [d.tau for d in self.taus]


def discount(t1: float, t2: float, conv: MarketConventions) -> float:
    """Discount factor ``exp(-r_h (t2 - t1))`` between two times in hours.

    Equals 1 when ``t1 == t2``; requires ``t2 >= t1``.
    """
    if t2 < t1:
        raise DomainError(f"cannot discount backwards: t1={t1} > t2={t2}")
    return math.exp(-conv.hourly_rate * (t2 - t1))


_CONVENTION_KEYS = {
    "epsilon_hours": "epsilon",
    "delta_hours": "delta",
    "annual_rate": "annual_rate",
    "hours_per_year": "hours_per_year",
}


def load_conventions(path) -> MarketConventions:
    """Read conventions from a key/value text file.

    Recognised keys: ``epsilon_hours``, ``delta_hours``, ``annual_rate``,
    ``hours_per_year``.  Separators may be whitespace, ``=`` or ``:``;
    ``#`` starts a comment.  Missing keys keep their defaults.
    """
    values: dict[str, float] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        for sep in ("=", ":"):
            line = line.replace(sep, " ")
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"{path}:{lineno}: expected 'key value', got {raw!r}")
        key, value = parts
        if key not in _CONVENTION_KEYS:
            raise ParseError(f"{path}:{lineno}: unknown conventions key {key!r}")
        try:
            values[_CONVENTION_KEYS[key]] = float(value)
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {value!r} is not a number") from exc
    return MarketConventions(**values)
