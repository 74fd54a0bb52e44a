"""
Special and arithmetic functions used by every other service.

Floating-point kernels come from scipy.special; exact rational data (Bernoulli
numbers, harmonic numbers, factorisations) from sympy and fractions. Every
public evaluation returns an EvalResult whose bound is derived from the
remainder of the algorithm used.
"""
import cmath
import math
import threading
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import sympy
from scipy import special

from hlzeta.core.config import settings, SIEVE_CAPACITY
from hlzeta.core.exceptions import BranchError, CapacityError, DomainError, PoleError
from hlzeta.models.schemas import ArithKind, ComplexValue, EvalResult
from hlzeta.utils.logger import logger

EPS = float(np.finfo(float).eps)
EULER_GAMMA = float(np.euler_gamma)
LOG2 = math.log(2.0)
ZETA2 = math.pi ** 2 / 6.0

# Euler-Maclaurin shift and number of Bernoulli corrections for zeta(s, x)
_EM_SHIFT = 20
_EM_ORDER = 10

ComplexLike = Union[complex, float, ComplexValue]


def _as_complex(z: ComplexLike) -> complex:
    return z.to_complex() if isinstance(z, ComplexValue) else complex(z)


# ---------------------------------------------------------------------------
# Gamma
# ---------------------------------------------------------------------------

def gamma_value(z: Union[float, complex]) -> Union[float, complex]:
    """Raw Gamma value with the pole check; no bound."""
    zc = complex(z)
    if zc.imag == 0.0 and zc.real <= 0.0 and zc.real == math.floor(zc.real):
        raise PoleError(f"Gamma has a pole at {zc.real:g}", point=zc.real)
    if zc.imag == 0.0:
        return float(special.gamma(zc.real))
    return complex(special.gamma(zc))


def gamma_complex(z: ComplexLike) -> EvalResult:
    """
    Gamma function for complex argument.

    Args:
        z: Argument, not a non-positive integer

    Returns:
        Gamma(z) with a relative bound of 64 eps max(1, |z|)
    """
    zc = _as_complex(z)
    value = gamma_value(zc)
    if not cmath.isfinite(complex(value)):
        raise DomainError(f"Gamma({zc}) overflows double precision")
    bound = 64.0 * EPS * abs(value) * max(1.0, abs(zc))
    return EvalResult(value=value, error_bound=bound)


# ---------------------------------------------------------------------------
# Bernoulli polynomials and harmonic numbers (exact)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def bernoulli_coefficients(r: int) -> Tuple[Fraction, ...]:
    """Coefficients of the standard Bernoulli polynomial B_r, highest degree first."""
    if r < 0 or r > 30:
        raise DomainError(f"Bernoulli polynomial order {r} outside [0, 30]")
    x = sympy.Symbol("x")
    poly = sympy.Poly(sympy.bernoulli(r, x), x)
    return tuple(Fraction(int(c.p), int(c.q)) for c in poly.all_coeffs())


def bernoulli_number(n: int) -> Fraction:
    """B_n = B_n(0), so B_1 = -1/2."""
    return bernoulli_coefficients(n)[-1]


def bernoulli_poly(r: int, x: Union[int, float, Fraction]) -> Union[float, Fraction]:
    """
    Standard Bernoulli polynomial B_r(x) with sum B_r(x) t^r / r! = t e^{tx}/(e^t - 1).

    Exact Fraction result for rational input, float otherwise.
    """
    coeffs = bernoulli_coefficients(r)
    if isinstance(x, (int, Fraction)):
        acc = Fraction(0)
        for c in coeffs:
            acc = acc * x + c
        return acc
    acc = 0.0
    for c in coeffs:
        acc = acc * x + float(c)
    return acc


_harmonic_lock = threading.Lock()
_harmonic_tables: Dict[int, List[Fraction]] = {}


def harmonic(n: int, order: int = 1) -> Fraction:
    """Exact generalised harmonic number sum_{k<=n} k^{-order}."""
    if n < 0:
        raise DomainError("harmonic numbers need n >= 0")
    with _harmonic_lock:
        table = _harmonic_tables.setdefault(order, [Fraction(0)])
        while len(table) <= n:
            k = len(table)
            table.append(table[-1] + Fraction(1, k ** order))
        return table[n]


# ---------------------------------------------------------------------------
# Zeta family
# ---------------------------------------------------------------------------

def hurwitz_zeta_raw(s: float, x: float) -> Tuple[float, float]:
    """
    Hurwitz zeta by Euler-Maclaurin with a shift of 20 and 10 corrections.

    Valid for real s != 1 (continuation included) and x > 0.

    Returns:
        (value, error bound)
    """
    if x <= 0.0:
        raise DomainError(f"Hurwitz zeta needs x > 0, got {x}")
    if s == 1.0:
        raise PoleError("zeta(s, x) has a pole at s = 1", point=1.0)

    N = _EM_SHIFT
    k = np.arange(N, dtype=float) + x
    head_terms = k ** (-s)
    head = math.fsum(head_terms)
    a = N + x

    total_abs = float(np.sum(np.abs(head_terms)))
    tail = a ** (1.0 - s) / (s - 1.0) + 0.5 * a ** (-s)
    total_abs += abs(tail)

    corrections = 0.0
    rising = s  # (s)_{2j-1}
    power = a ** (-s - 1.0)
    last = 0.0
    for j in range(1, _EM_ORDER + 2):
        term = float(bernoulli_number(2 * j)) / math.factorial(2 * j) * rising * power
        if j <= _EM_ORDER:
            corrections += term
            total_abs += abs(term)
        else:
            last = term
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        power /= a * a

    value = head + tail + corrections
    bound = 2.0 * abs(last) + 4.0 * EPS * total_abs
    return value, bound


def riemann_zeta(s: float) -> float:
    """Riemann zeta for real s != 1."""
    return hurwitz_zeta_raw(s, 1.0)[0]


def eta_raw(s: float) -> Tuple[float, float]:
    """Dirichlet eta (1 - 2^{1-s}) zeta(s), with eta(1) = log 2."""
    if s == 1.0:
        return LOG2, EPS
    factor = -math.expm1((1.0 - s) * LOG2)
    z, zb = hurwitz_zeta_raw(s, 1.0)
    return factor * z, abs(factor) * zb + 2.0 * EPS * abs(factor * z)


def zeta_family(kind: str, s: float, x: Optional[float] = None) -> EvalResult:
    """
    Riemann, Dirichlet eta or Hurwitz zeta at real s.

    Args:
        kind: "riemann", "eta" or "hurwitz"
        s: Real exponent, continuation allowed for s > -2
        x: Hurwitz shift (required for hurwitz)

    Returns:
        Value with the Euler-Maclaurin remainder as bound
    """
    if s <= -2.0:
        raise DomainError(f"zeta continuation supported only for s > -2, got {s}")
    if kind == "riemann":
        value, bound = hurwitz_zeta_raw(s, 1.0)
    elif kind == "hurwitz":
        if x is None:
            raise DomainError("hurwitz zeta needs x")
        value, bound = hurwitz_zeta_raw(s, float(x))
    elif kind == "eta":
        value, bound = eta_raw(s)
    else:
        raise DomainError(f"unknown zeta kind {kind!r}")
    return EvalResult(value=value, error_bound=bound)


# ---------------------------------------------------------------------------
# Bessel functions
# ---------------------------------------------------------------------------

_REAL_BESSEL = {
    "J0": special.j0,
    "J1": special.j1,
    "Y0": special.y0,
    "K0": special.k0,
}


def bessel_real(kind: str, x: float) -> EvalResult:
    """
    J0, J1, Y0 or K0 at real x (cephes kernels).

    Args:
        kind: One of J0, J1, Y0, K0
        x: Argument (x >= 0 for J0/J1, x > 0 for Y0/K0)

    Returns:
        Value with an absolute bound of 64 eps max(1, |value|)
    """
    if kind not in _REAL_BESSEL:
        raise DomainError(f"unknown Bessel kind {kind!r}")
    if kind in ("Y0", "K0") and x <= 0.0:
        raise DomainError(f"{kind} needs x > 0, got {x}")
    if kind in ("J0", "J1") and x < 0.0:
        raise DomainError(f"{kind} is evaluated for x >= 0 only")
    value = float(_REAL_BESSEL[kind](x))
    return EvalResult(value=value, error_bound=64.0 * EPS * max(1.0, abs(value)))


def bessel_k_complex(nu: float, z: ComplexLike) -> EvalResult:
    """
    Modified Bessel K_nu on the principal branch, nu in {0, 1/2, 1}.

    K_{1/2} is evaluated in closed form; other orders use the AMOS routines
    behind scipy.special.kv.
    """
    zc = _as_complex(z)
    if zc.imag == 0.0 and zc.real <= 0.0:
        raise BranchError(f"K_nu is cut along the non-positive real axis, got {zc}")
    if nu == 0.5:
        value = cmath.sqrt(math.pi / (2.0 * zc)) * cmath.exp(-zc)
        bound = 8.0 * EPS * abs(value) * max(1.0, abs(zc))
    elif nu in (0.0, 1.0):
        value = complex(special.kv(nu, zc))
        bound = 1e-14 * abs(value) * max(1.0, math.log1p(abs(zc)))
    else:
        raise DomainError(f"Bessel order {nu} is not supported")
    if not cmath.isfinite(value):
        raise DomainError(f"K_{nu}({zc}) is not representable")
    if zc.imag == 0.0:
        value = value.real
    return EvalResult(value=value, error_bound=bound)


def k0_vector(w: np.ndarray) -> np.ndarray:
    """K0 on an array of complex arguments off the cut."""
    return special.kv(0, w)


# ---------------------------------------------------------------------------
# Exponential integral helpers
# ---------------------------------------------------------------------------

def ein(z: complex) -> Tuple[complex, float]:
    """
    Entire function Ein(z) = int_0^z (1 - e^{-t})/t dt.

    Returns:
        (value, error bound)
    """
    z = complex(z)
    if abs(z) < 1.0:
        total = 0j
        term = 1 + 0j
        k = 1
        while True:
            term *= z / k  # z^k / k!
            contribution = (term / k) * (1 if k % 2 else -1)
            total += contribution
            if abs(contribution) <= EPS * abs(total) * 1e-2 or k > 60:
                break
            k += 1
        return total, 4.0 * EPS * max(abs(total), abs(z))
    if z.real <= 0.0 and z.imag == 0.0:
        raise DomainError("Ein via E1 needs z off the negative axis")
    value = complex(special.exp1(z)) + cmath.log(z) + EULER_GAMMA
    return value, 1e-14 * max(1.0, abs(value))


# ---------------------------------------------------------------------------
# Arithmetic functions
# ---------------------------------------------------------------------------

class Sieve:
    """
    Lazily built arithmetic tables.

    Tables are created on first use under a lock, so concurrent callers see
    either nothing or a complete table.
    """

    def __init__(self, bound: Optional[int] = None, r3_bound: Optional[int] = None):
        """Initialize the sieve without building anything yet."""
        self._bound = min(bound or settings.sieve_bound, SIEVE_CAPACITY)
        self._r3_bound = min(r3_bound or settings.r3_bound, self._bound)
        self._lock = threading.RLock()
        self._tables: Dict[str, np.ndarray] = {}
        self._lcm_cache: Dict[int, int] = {}

    @property
    def bound(self) -> int:
        return self._bound

    @property
    def r3_bound(self) -> int:
        return self._r3_bound

    def resize(self, bound: int) -> None:
        """Change the capacity; built tables are dropped."""
        if bound > SIEVE_CAPACITY:
            raise CapacityError(
                f"sieve bound {bound} exceeds the hard cap {SIEVE_CAPACITY}",
                requested=bound,
                capacity=SIEVE_CAPACITY,
            )
        with self._lock:
            if bound == self._bound:
                return
            self._bound = bound
            self._r3_bound = min(settings.r3_bound, bound)
            self._tables.clear()
            self._lcm_cache.clear()
            logger.info("sieve resized", bound=bound)

    def check(self, n: int, capacity: Optional[int] = None) -> None:
        capacity = capacity or self._bound
        if n > capacity:
            raise CapacityError(
                f"{n} exceeds the sieve capacity {capacity}", requested=n, capacity=capacity
            )

    def _table(self, name: str, builder) -> np.ndarray:
        table = self._tables.get(name)
        if table is not None:
            return table
        with self._lock:
            table = self._tables.get(name)
            if table is None:
                table = builder()
                table.flags.writeable = False
                self._tables[name] = table
                logger.debug("sieve table built", table=name, size=int(table.shape[0]))
            return table

    # -- builders ---------------------------------------------------------

    def _build_spf(self) -> np.ndarray:
        N = self._bound
        spf = np.zeros(N + 1, dtype=np.int64)
        for p in range(2, math.isqrt(N) + 1):
            if spf[p] == 0:
                view = spf[p * p :: p]
                view[view == 0] = p
        idx = np.arange(N + 1)
        mask = spf == 0
        spf[mask] = idx[mask]
        spf[0] = 0
        spf[1] = 1
        return spf

    def primes(self, upto: Optional[int] = None) -> np.ndarray:
        upto = self._bound if upto is None else upto
        self.check(upto)
        spf = self._table("spf", self._build_spf)
        idx = np.arange(upto + 1)
        return idx[(spf[: upto + 1] == idx) & (idx >= 2)]

    def _exponent_walk(self, p: int):
        """Yield (multiples of p, exponent of p in each multiple)."""
        idx = np.arange(p, self._bound + 1, p)
        exps = np.ones(idx.shape[0], dtype=np.int64)
        q = idx // p
        live = (q % p) == 0
        while live.any():
            exps[live] += 1
            q[live] //= p
            live = live & ((q % p) == 0)
        return idx, exps

    def _build_factor_tables(self) -> None:
        N = self._bound
        mu = np.ones(N + 1, dtype=np.int8)
        omega = np.zeros(N + 1, dtype=np.int8)
        big_omega = np.zeros(N + 1, dtype=np.int8)
        dcount = np.ones(N + 1, dtype=np.int64)
        mangoldt = np.zeros(N + 1, dtype=float)
        for p in self.primes():
            p = int(p)
            idx, exps = self._exponent_walk(p)
            omega[idx] += 1
            big_omega[idx] += exps.astype(np.int8)
            dcount[idx] *= exps + 1
            mu[idx] = np.where(exps > 1, 0, -mu[idx])
            pk = p
            while pk <= N:
                mangoldt[pk] = math.log(p)
                pk *= p
        mu[0] = 0
        dcount[0] = 0
        self._tables.update(
            {"mu": mu, "omega": omega, "big_omega": big_omega, "d": dcount, "mangoldt": mangoldt}
        )

    def _factor_table(self, name: str) -> np.ndarray:
        table = self._tables.get(name)
        if table is not None:
            return table
        with self._lock:
            if name not in self._tables:
                self._build_factor_tables()
                for key in ("mu", "omega", "big_omega", "d", "mangoldt"):
                    self._tables[key].flags.writeable = False
                logger.debug("sieve factor tables built", bound=self._bound)
            return self._tables[name]

    def sigma(self, s: float) -> np.ndarray:
        """sigma_s(n) = sum_{d | n} d^s as a float table."""
        name = f"sigma:{s!r}"

        def build() -> np.ndarray:
            N = self._bound
            table = np.ones(N + 1, dtype=float)
            for p in self.primes():
                p = int(p)
                idx, exps = self._exponent_walk(p)
                if s == 0:
                    table[idx] *= exps + 1
                else:
                    ps = float(p) ** s
                    table[idx] *= (ps ** (exps + 1) - 1.0) / (ps - 1.0)
            table[0] = 0.0
            return table

        return self._table(name, build)

    def _build_r3(self) -> np.ndarray:
        M = self._r3_bound
        r1 = np.zeros(M + 1, dtype=np.int64)
        r1[0] = 1
        for k in range(1, math.isqrt(M) + 1):
            r1[k * k] = 2
        r2 = np.zeros(M + 1, dtype=np.int64)
        r3 = np.zeros(M + 1, dtype=np.int64)
        for k in range(0, math.isqrt(M) + 1):
            sq = k * k
            r2[sq:] += r1[sq] * r1[: M + 1 - sq]
        for k in range(0, math.isqrt(M) + 1):
            sq = k * k
            r3[sq:] += r1[sq] * r2[: M + 1 - sq]
        return r3

    # -- public tables ----------------------------------------------------

    def mobius(self, upto: int) -> np.ndarray:
        self.check(upto)
        return self._factor_table("mu")[: upto + 1]

    def mangoldt(self, upto: int) -> np.ndarray:
        self.check(upto)
        return self._factor_table("mangoldt")[: upto + 1]

    def liouville(self, upto: int) -> np.ndarray:
        self.check(upto)
        big = self._factor_table("big_omega")[: upto + 1].astype(np.int64)
        out = np.where(big % 2 == 0, 1, -1)
        out[0] = 0
        return out

    def omega(self, upto: int) -> np.ndarray:
        self.check(upto)
        return self._factor_table("omega")[: upto + 1]

    def divisor_count(self, upto: int) -> np.ndarray:
        self.check(upto)
        return self._factor_table("d")[: upto + 1]

    def r3(self, upto: int) -> np.ndarray:
        self.check(upto, self._r3_bound)
        return self._table("r3", self._build_r3)[: upto + 1]

    def chebyshev_psi(self, upto: int) -> np.ndarray:
        self.check(upto)
        return self._table("psi", lambda: np.cumsum(self._factor_table("mangoldt")))[: upto + 1]

    def lcm_upto(self, n: int) -> int:
        """Exact lcm(1, ..., n) as a product of maximal prime powers."""
        self.check(n)
        with self._lock:
            if n not in self._lcm_cache:
                result = 1
                for p in self.primes(n):
                    p = int(p)
                    pk = p
                    while pk * p <= n:
                        pk *= p
                    result *= pk
                self._lcm_cache[n] = result
            return self._lcm_cache[n]


def arithmetic(kind: Union[ArithKind, str], n: int, s: Optional[float] = None) -> Union[int, float]:
    """
    Integer-valued arithmetic functions (sigma_s and psi are real-valued).

    Args:
        kind: ArithKind member or its value
        n: Positive integer within the sieve capacity
        s: Exponent for sigma_s

    Returns:
        Exact value
    """
    kind = ArithKind(kind)
    if n < 1:
        raise DomainError(f"arithmetic functions need n >= 1, got {n}")

    if kind is ArithKind.MOBIUS:
        return int(sieve.mobius(n)[n])
    if kind is ArithKind.MANGOLDT:
        return float(sieve.mangoldt(n)[n])
    if kind is ArithKind.LIOUVILLE:
        return int(sieve.liouville(n)[n])
    if kind is ArithKind.OMEGA_DISTINCT:
        return int(sieve.omega(n)[n])
    if kind is ArithKind.DIVISOR_COUNT:
        return int(sieve.divisor_count(n)[n])
    if kind is ArithKind.SIGMA_S:
        if s is None:
            raise DomainError("sigma_s needs s")
        sieve.check(n)
        value = float(sieve.sigma(s)[n])
        return int(round(value)) if float(s).is_integer() and s >= 0 else value
    if kind is ArithKind.R3:
        return int(sieve.r3(n)[n])
    if kind is ArithKind.CHEBYSHEV_PSI:
        return float(sieve.chebyshev_psi(n)[n])
    return sieve.lcm_upto(n)


def arithmetic_table(kind: Union[ArithKind, str], upto: int, s: Optional[float] = None) -> np.ndarray:
    """Whole table of an arithmetic function on 0..upto (index 0 is a placeholder)."""
    kind = ArithKind(kind)
    if kind is ArithKind.MOBIUS:
        return sieve.mobius(upto)
    if kind is ArithKind.MANGOLDT:
        return sieve.mangoldt(upto)
    if kind is ArithKind.LIOUVILLE:
        return sieve.liouville(upto)
    if kind is ArithKind.OMEGA_DISTINCT:
        return sieve.omega(upto)
    if kind is ArithKind.DIVISOR_COUNT:
        return sieve.divisor_count(upto)
    if kind is ArithKind.SIGMA_S:
        if s is None:
            raise DomainError("sigma_s needs s")
        sieve.check(upto)
        return sieve.sigma(s)[: upto + 1]
    if kind is ArithKind.R3:
        return sieve.r3(upto)
    if kind is ArithKind.CHEBYSHEV_PSI:
        return sieve.chebyshev_psi(upto)
    raise DomainError("lcm_upto has no table form; use arithmetic()")


# Global sieve instance
sieve = Sieve()
