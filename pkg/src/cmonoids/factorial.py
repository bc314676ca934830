"""Elements of a factorial monoid ``F = F^x * F(P)`` with finite units and finite ``P``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .abelian import TRIVIAL, FiniteAbelianGroup
from .errors import AmbientMismatch, UnknownPrime


@dataclass(frozen=True)
class Ambient:
    units: FiniteAbelianGroup
    primes: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "primes", tuple(self.primes))
        if len(set(self.primes)) != len(self.primes):
            raise ValueError("prime labels must be distinct")

    @classmethod
    def free(cls, nprimes: int, units: FiniteAbelianGroup = TRIVIAL) -> "Ambient":
        return cls(units, tuple(f"p{i + 1}" for i in range(nprimes)))

    @property
    def d(self) -> int:
        return len(self.primes)

    def prime_index(self, p) -> int:
        if isinstance(p, int):
            if 0 <= p < self.d:
                return p
        elif p in self.primes:
            return self.primes.index(p)
        raise UnknownPrime(f"{p!r} is not a prime of this ambient monoid")

    def one(self) -> "FactorialElement":
        return FactorialElement(self, self.units.zero(), (0,) * self.d)

    def unit(self, eps) -> "FactorialElement":
        return FactorialElement(self, eps, (0,) * self.d)

    def prime(self, p) -> "FactorialElement":
        i = self.prime_index(p)
        return FactorialElement(self, self.units.zero(), tuple(int(j == i) for j in range(self.d)))

    def element(self, exps: Sequence[int], unit=None) -> "FactorialElement":
        return FactorialElement(self, self.units.zero() if unit is None else unit, exps)


@dataclass(frozen=True)
class FactorialElement:
    ambient: Ambient
    unit: tuple[int, ...]
    exps: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "unit", self.ambient.units.reduce(self.unit))
        exps = tuple(int(e) for e in self.exps)
        object.__setattr__(self, "exps", exps)
        if len(exps) != self.ambient.d:
            raise ValueError(f"expected {self.ambient.d} exponents, got {len(exps)}")
        if any(e < 0 for e in exps):
            raise ValueError("exponents must be non-negative")

    def __mul__(self, other: "FactorialElement") -> "FactorialElement":
        return multiply(self, other)

    def __pow__(self, k: int) -> "FactorialElement":
        if k < 0:
            raise ValueError("negative powers leave F")
        return FactorialElement(self.ambient, self.ambient.units.scale(k, self.unit), tuple(k * e for e in self.exps))

    @property
    def is_unit(self) -> bool:
        return not any(self.exps)

    @property
    def degree(self) -> int:
        return sum(self.exps)

    def __str__(self) -> str:
        return format_element(self)


def _check_same(a: FactorialElement, b: FactorialElement) -> None:
    if a.ambient != b.ambient:
        raise AmbientMismatch("elements live in different factorial monoids")


def multiply(a: FactorialElement, b: FactorialElement) -> FactorialElement:
    _check_same(a, b)
    return FactorialElement(
        a.ambient,
        a.ambient.units.add(a.unit, b.unit),
        tuple(x + y for x, y in zip(a.exps, b.exps)),
    )


def v_p(a: FactorialElement, p) -> int:
    return a.exps[a.ambient.prime_index(p)]


def reduce_exponent(e: int, alpha: int) -> int:
    return e if e < 2 * alpha else alpha + (e - alpha) % alpha


def alpha_reduce(a: FactorialElement, alpha: int) -> FactorialElement:
    """Fold every exponent ``>= 2*alpha`` into the window ``[alpha, 2*alpha)``."""
    if alpha < 1:
        raise ValueError("alpha must be positive")
    return FactorialElement(a.ambient, a.unit, tuple(reduce_exponent(e, alpha) for e in a.exps))


def divides(a: FactorialElement, b: FactorialElement) -> bool:
    _check_same(a, b)
    return all(x <= y for x, y in zip(a.exps, b.exps))


def format_element(a: FactorialElement) -> str:
    parts = []
    if any(a.unit):
        parts.append(f"eps_{a.ambient.units.index(a.unit)}")
    for label, e in zip(a.ambient.primes, a.exps):
        if e == 1:
            parts.append(label)
        elif e:
            parts.append(f"{label}^{e}")
    return " * ".join(parts) if parts else "1"
