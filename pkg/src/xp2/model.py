"""Shared data types: model parameters, energies, operator orderings, spectra."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from xp2.errors import DomainError


@dataclass(frozen=True)
class ModelParams:
    """Regulator ``a`` and reduced Planck constant of H = (x^2+a^2)(p^2+a^2)."""

    a: float
    hbar: float = 1.0

    def __post_init__(self):
        if not (self.a > 0 and math.isfinite(self.a)):
            raise DomainError(f"regulator a must be positive and finite, got {self.a}")
        if not (self.hbar > 0 and math.isfinite(self.hbar)):
            raise DomainError(f"hbar must be positive and finite, got {self.hbar}")

    def level_value(self, e: float) -> float:
        return e * e + self.a ** 4

    def natural_units(self) -> "ModelParams":
        """Equivalent problem with hbar = 1.

        With x = sqrt(hbar) X and p = sqrt(hbar) P the Hamiltonian becomes
        hbar^2 (X^2 + a'^2)(P^2 + a'^2) with a' = a/sqrt(hbar), so
        E(a, hbar) = hbar * E(a', 1).
        """
        return ModelParams(self.a / math.sqrt(self.hbar), 1.0)


@dataclass(frozen=True)
class EnergyPoint:
    """Energy label ``e`` together with the level value h_e = e^2 + a^4."""

    e: float
    h_e: float

    @classmethod
    def from_e(cls, params: ModelParams, e: float) -> "EnergyPoint":
        if e < 0 or not math.isfinite(e):
            raise DomainError(f"energy label must be finite and >= 0, got {e}")
        return cls(float(e), params.level_value(e))

    @classmethod
    def from_h(cls, params: ModelParams, h_e: float) -> "EnergyPoint":
        floor = params.a ** 4
        if h_e < floor:
            raise DomainError(f"H_E = {h_e} lies below the minimum a^4 = {floor}")
        return cls(math.sqrt(h_e - floor), float(h_e))


class QuantForm(enum.Enum):
    """The three operator orderings.

    Each reduces to (x^2+a^2) phi'' + drift x phi' + (E^2 + c - a^2 x^2) phi = 0
    for the auxiliary function phi, with (c, drift) = (1, 2), (0, 1), (0, 0).
    """

    I = 1
    II = 2
    III = 3

    @property
    def c(self) -> float:
        return 1.0 if self is QuantForm.I else 0.0

    @property
    def drift(self) -> float:
        return float(3 - self.value)

    @classmethod
    def parse(cls, value) -> "QuantForm":
        if isinstance(value, QuantForm):
            return value
        text = str(value).strip().upper()
        table = {"1": cls.I, "I": cls.I, "H1": cls.I, "2": cls.II, "II": cls.II, "H2": cls.II,
                 "3": cls.III, "III": cls.III, "H3": cls.III}
        try:
            return table[text]
        except KeyError:
            raise DomainError(f"unknown operator ordering {value!r}") from None

    @property
    def label(self) -> str:
        return f"H{self.value}"


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"

    @classmethod
    def of_level(cls, n: int) -> "Parity":
        """Level n (1-based) has n - 1 nodes, hence even parity for odd n."""
        return cls.EVEN if n % 2 == 1 else cls.ODD


@dataclass(frozen=True)
class Level:
    n: int
    parity: Parity
    e: float
    h_e: float
    residual: float
    backend: str
    valid: bool = True


@dataclass
class Spectrum:
    levels: list[Level]
    config: dict = field(default_factory=dict)

    def energies(self):
        return [lv.e for lv in self.levels]

    def by_n(self, n: int) -> Level:
        for lv in self.levels:
            if lv.n == n:
                return lv
        raise KeyError(n)

    def select(self, lo: int, hi: int) -> "Spectrum":
        return Spectrum([lv for lv in self.levels if lo <= lv.n <= hi], dict(self.config))

    def __len__(self):
        return len(self.levels)

    def __iter__(self):
        return iter(self.levels)
