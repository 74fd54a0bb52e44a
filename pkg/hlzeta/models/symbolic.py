"""
Exact constants in the rational span of {1, log p (p prime), zeta(2)}.
"""
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Optional, Union

import mpmath
from sympy import factorint

from hlzeta.core.exceptions import DomainError

RationalLike = Union[int, Fraction]

_TERM = re.compile(
    r"\s*([+-])?\s*(?:(\d+(?:/\d+)?)\s*\*?\s*)?(log\((\d+)\)|zeta2)?\s*"
)


def _prime_logs(n: int, coeff: Fraction) -> Dict[int, Fraction]:
    if n < 1:
        raise DomainError(f"log of a non-positive integer: {n}")
    return {int(p): coeff * int(e) for p, e in factorint(n).items()}


@dataclass(frozen=True)
class SymbolicConstant:
    """
    ``rational + sum_p c_p log p + zeta2_coeff * zeta(2)`` held exactly.

    Log arguments are decomposed into primes at construction, so equality is
    structural: ``log 6`` and ``log 2 + log 3`` build the same value.
    """

    rational: Fraction = Fraction(0)
    log_coeffs: Mapping[int, Fraction] = field(default_factory=dict)
    zeta2_coeff: Fraction = Fraction(0)

    def __post_init__(self):
        canonical: Dict[int, Fraction] = {}
        for base, coeff in self.log_coeffs.items():
            for p, c in _prime_logs(int(base), Fraction(coeff)).items():
                canonical[p] = canonical.get(p, Fraction(0)) + c
        canonical = {p: c for p, c in sorted(canonical.items()) if c != 0}
        object.__setattr__(self, "rational", Fraction(self.rational))
        object.__setattr__(self, "zeta2_coeff", Fraction(self.zeta2_coeff))
        object.__setattr__(self, "log_coeffs", canonical)

    # -- constructors -----------------------------------------------------

    @classmethod
    def rational_value(cls, q: RationalLike) -> "SymbolicConstant":
        return cls(rational=Fraction(q))

    @classmethod
    def log(cls, n: int, coeff: RationalLike = 1) -> "SymbolicConstant":
        return cls(log_coeffs={n: Fraction(coeff)})

    @classmethod
    def zeta2(cls, coeff: RationalLike = 1) -> "SymbolicConstant":
        return cls(zeta2_coeff=Fraction(coeff))

    @classmethod
    def parse(cls, text: str) -> "SymbolicConstant":
        """Parse the canonical string form, e.g. ``25/6 + log(2) - 2*log(3) - 3/2*zeta2``."""
        total = cls()
        pos = 0
        text = text.strip()
        if not text:
            raise DomainError("empty symbolic constant")
        while pos < len(text):
            match = _TERM.match(text, pos)
            if not match or match.end() == pos:
                raise DomainError(f"cannot parse symbolic constant near {text[pos:]!r}")
            sign, coeff, atom, base = match.groups()
            if coeff is None and atom is None:
                raise DomainError(f"dangling sign in {text!r}")
            c = Fraction(coeff) if coeff else Fraction(1)
            if sign == "-":
                c = -c
            if atom is None:
                total = total + cls.rational_value(c)
            elif atom == "zeta2":
                total = total + cls.zeta2(c)
            else:
                total = total + cls.log(int(base), c)
            pos = match.end()
        return total

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: "SymbolicConstant") -> "SymbolicConstant":
        if isinstance(other, (int, Fraction)):
            other = SymbolicConstant.rational_value(other)
        logs = dict(self.log_coeffs)
        for p, c in other.log_coeffs.items():
            logs[p] = logs.get(p, Fraction(0)) + c
        return SymbolicConstant(
            rational=self.rational + other.rational,
            log_coeffs=logs,
            zeta2_coeff=self.zeta2_coeff + other.zeta2_coeff,
        )

    __radd__ = __add__

    def __neg__(self) -> "SymbolicConstant":
        return self.scale(-1)

    def __sub__(self, other: "SymbolicConstant") -> "SymbolicConstant":
        return self + (-other if isinstance(other, SymbolicConstant) else -Fraction(other))

    def scale(self, factor: RationalLike) -> "SymbolicConstant":
        factor = Fraction(factor)
        return SymbolicConstant(
            rational=self.rational * factor,
            log_coeffs={p: c * factor for p, c in self.log_coeffs.items()},
            zeta2_coeff=self.zeta2_coeff * factor,
        )

    def __mul__(self, factor: RationalLike) -> "SymbolicConstant":
        return self.scale(factor)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymbolicConstant):
            return NotImplemented
        return (
            self.rational == other.rational
            and dict(self.log_coeffs) == dict(other.log_coeffs)
            and self.zeta2_coeff == other.zeta2_coeff
        )

    def __hash__(self) -> int:
        return hash((self.rational, tuple(self.log_coeffs.items()), self.zeta2_coeff))

    # -- evaluation -------------------------------------------------------

    def evaluate(self, dps: int = 30) -> float:
        """Numeric value; the sum is formed at ``dps`` digits, so cancellation is harmless."""
        with mpmath.workdps(dps):
            total = mpmath.mpf(self.rational.numerator) / self.rational.denominator
            for p, c in self.log_coeffs.items():
                total += mpmath.mpf(c.numerator) / c.denominator * mpmath.log(p)
            z = self.zeta2_coeff
            total += mpmath.mpf(z.numerator) / z.denominator * mpmath.zeta(2)
            return float(total)

    def __float__(self) -> float:
        return self.evaluate()

    def to_dict(self) -> Dict[str, object]:
        return {
            "rational": str(self.rational),
            "log_coeffs": {str(p): str(c) for p, c in self.log_coeffs.items()},
            "zeta2_coeff": str(self.zeta2_coeff),
        }

    def __str__(self) -> str:
        parts = []

        def emit(coeff: Fraction, atom: Optional[str]):
            sign = "-" if coeff < 0 else "+"
            mag = abs(coeff)
            if atom is None:
                body = str(mag)
            elif mag == 1:
                body = atom
            else:
                body = f"{mag}*{atom}"
            parts.append((sign, body))

        if self.rational != 0:
            emit(self.rational, None)
        for p, c in self.log_coeffs.items():
            emit(c, f"log({p})")
        if self.zeta2_coeff != 0:
            emit(self.zeta2_coeff, "zeta2")
        if not parts:
            return "0"

        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"SymbolicConstant({self})"


@dataclass(frozen=True)
class FranelPiece:
    """An interval on which floor(n x) = j and floor(m / x) = k are constant."""

    lo: Fraction
    hi: Fraction
    j: int
    k: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"empty Franel piece [{self.lo}, {self.hi}]")
