"""
Sawtooth functions and the identities built on them.

Two conventions are kept apart everywhere: the fractional part x - floor(x)
and the centered sawtooth x - floor(x) - 1/2 (zero at integers). The sum
rho_sum(x) = sum_{n<=x} (x/n - floor(x/n) - 1/2)/n is a third object and is
never called a sawtooth.
"""
import math
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import special

from hlzeta.core.config import settings
from hlzeta.core.exceptions import CapacityError, ConvergenceError, DomainError
from hlzeta.models.schemas import (
    DecompositionFunction,
    EvalResult,
    IdentityReport,
    Integrand,
    QuadratureSpec,
    SawtoothConvention,
    TruncationPolicy,
)
from hlzeta.services import quadrature
from hlzeta.services.hlseries import eval_sin2_sum
from hlzeta.services.specfun import EPS, ZETA2, hurwitz_zeta_raw, riemann_zeta, sieve
from hlzeta.utils.logger import logger

Number = Union[float, int, Fraction]

# sup |B_3(t)| / 6 over [0, 1]
_B3_SUP = math.sqrt(3.0) / 216.0


def sawtooth(x: Number, conv: Union[SawtoothConvention, str] = SawtoothConvention.FRACTIONAL) -> Number:
    """
    Fractional part or centered sawtooth of x.

    Fractions stay exact; floats are handled in floating point.
    """
    conv = SawtoothConvention(conv)
    frac = x - math.floor(x)
    if isinstance(frac, float) and frac >= 1.0:
        # tiny negative x rounds up to 1.0
        frac = math.nextafter(1.0, 0.0)
    if conv is SawtoothConvention.FRACTIONAL:
        return frac
    if frac == 0:
        return 0 * frac
    return frac - (Fraction(1, 2) if isinstance(frac, Fraction) else 0.5)


def rho_sum(x: float) -> float:
    """sum_{n<=x} (x/n - floor(x/n) - 1/2)/n, with the -1/2 kept at every n."""
    N = math.floor(x)
    if N < 1:
        return 0.0
    n = np.arange(1, N + 1, dtype=float)
    q = x / n
    return math.fsum(((q - np.floor(q) - 0.5) / n).tolist())


def rho_bar(x: float) -> float:
    """sum_{n<=x} {x/n}/n with the centered sawtooth."""
    N = math.floor(x)
    if N < 1:
        return 0.0
    n = np.arange(1, N + 1, dtype=float)
    q = x / n
    frac = q - np.floor(q)
    return math.fsum((np.where(frac == 0.0, 0.0, frac - 0.5) / n).tolist())


# ---------------------------------------------------------------------------
# Kubert identity
# ---------------------------------------------------------------------------

def kubert_check(m: int, x: float, tolerance: float = 1e-13) -> IdentityReport:
    """
    sum_{l<m} {x + l/m} = {m x} for the centered sawtooth.

    The arguments x + l/m are formed exactly from the binary value of x, so
    points that land on integers are recognised as such.
    """
    if m < 1:
        raise DomainError(f"kubert_check needs m >= 1, got {m}")
    exact_x = Fraction(x)
    parts = [sawtooth(exact_x + Fraction(l, m), SawtoothConvention.CENTERED) for l in range(m)]
    lhs = math.fsum(float(p) for p in parts)
    rhs = float(sawtooth(m * exact_x, SawtoothConvention.CENTERED))
    return IdentityReport.build(
        identity_id=f"kubert.m{m}",
        lhs=lhs,
        rhs=rhs,
        tolerance=tolerance,
        anchor="Kubert identity",
        details={"m": m, "x": x},
    )


# ---------------------------------------------------------------------------
# Divisor sums
# ---------------------------------------------------------------------------

def _sigma1(upto: int) -> np.ndarray:
    return sieve.sigma(1.0)[: upto + 1]


def divisor_sum_identity(x: float, tolerance: float = 1e-9) -> IdentityReport:
    """
    sum_{k<=x} sigma(k)/k = x sum_{n<=x} n^{-2} - rho_sum(x) - H_{floor(x)}/2.

    Integer x is checked exactly: every term is scaled by 2 lcm(1..x)^2 and
    the identity compared in integers. Otherwise the comparison is in
    floating point.

    Args:
        x: Real x >= 1 up to the sieve capacity
        tolerance: Floating-point tolerance for non-integer x

    Returns:
        IdentityReport with the S_1 remainder recorded
    """
    if x < 1:
        raise DomainError(f"divisor_sum_identity needs x >= 1, got {x}")
    if x > 1e7:
        raise CapacityError(f"divisor_sum_identity supports x <= 1e7, got {x}", requested=int(x), capacity=10_000_000)
    N = math.floor(x)
    sieve.check(N)
    sigma = _sigma1(N)

    if float(x).is_integer() and N <= 10_000:
        L = 2 * sieve.lcm_upto(N) ** 2
        lhs_scaled = sum(int(sigma[k]) * (L // k) for k in range(1, N + 1))
        squares = sum(L // (n * n) for n in range(1, N + 1))
        rho_scaled = sum(N * (L // (n * n)) - (N // n) * (L // n) - L // (2 * n) for n in range(1, N + 1))
        half_harmonic = sum(L // (2 * n) for n in range(1, N + 1))
        rhs_scaled = N * squares - rho_scaled - half_harmonic
        lhs = float(Fraction(lhs_scaled, L))
        rhs = float(Fraction(rhs_scaled, L))
        exact = lhs_scaled == rhs_scaled
        return IdentityReport.build(
            identity_id="divisor_sum",
            lhs=lhs,
            rhs=rhs,
            tolerance=tolerance,
            anchor="divisor and fractional-part sums",
            details={"x": x, "exact": exact, "s1_remainder": lhs - ZETA2 * x + 0.5 * math.log(x)},
        )

    k = np.arange(1, N + 1, dtype=float)
    lhs = math.fsum((sigma[1:] / k).tolist())
    rhs = x * math.fsum((1.0 / k ** 2).tolist()) - rho_sum(x) - 0.5 * math.fsum((1.0 / k).tolist())
    scale = max(abs(lhs), 1.0)
    return IdentityReport.build(
        identity_id="divisor_sum",
        lhs=lhs,
        rhs=rhs,
        tolerance=tolerance * scale,
        anchor="divisor and fractional-part sums",
        details={"x": x, "exact": False, "s1_remainder": lhs - ZETA2 * x + 0.5 * math.log(x)},
    )


def divisor_scan(x_grid: Sequence[float]) -> List[Tuple[float, float, float, float, float]]:
    """
    Rows (x, S_1(x), S_1 - zeta(2) x + log(x)/2, S^1(x), (S^1 - pi^2 x^2/12 + x rho_bar(x))/x).

    S_1(x) = sum_{k<=x} sigma(k)/k and S^1(x) = sum_{k<=x} sigma(k) = sum_d d floor(x/d).
    """
    rows = []
    upto = math.floor(max(x_grid))
    sieve.check(upto)
    sigma = _sigma1(upto)
    k = np.arange(1, upto + 1, dtype=float)
    s_lower = np.cumsum(sigma[1:] / k)
    s_upper = np.cumsum(sigma[1:])
    for x in sorted(float(v) for v in x_grid):
        N = math.floor(x)
        lower = float(s_lower[N - 1])
        upper = float(s_upper[N - 1])
        rows.append((
            x,
            lower,
            lower - ZETA2 * x + 0.5 * math.log(x),
            upper,
            (upper - math.pi ** 2 * x * x / 12.0 + x * rho_bar(x)) / x,
        ))
    return rows


# ---------------------------------------------------------------------------
# Integrals of the dilated sawtooth {theta/x}
# ---------------------------------------------------------------------------

TailModel = Callable[[int], Tuple[float, float]]


def dilated_sawtooth_integral(
    theta: float,
    f: Callable[[np.ndarray], np.ndarray],
    tail: TailModel,
    tolerance: float,
    extra_edges: Sequence[float] = (),
) -> EvalResult:
    """
    int_0^1 frac(theta/x) f(x) dx.

    [theta/U, 1] is integrated piecewise with breakpoints at theta/k; the part
    below b = theta/U is given by ``tail(U) -> (value, bound)``. For
    |f| <= L x and |f'| <= L that part is F(b)/2 within theta^2 L/(8 U^3).

    Args:
        theta: Dilation in (0, 1]
        f: Vectorised f
        tail: Model of the integral over (0, theta/U)
        tolerance: Target absolute error
        extra_edges: Additional breakpoints in (0, 1)

    Returns:
        Integral with bound
    """
    if not 0.0 < theta <= 1.0:
        raise DomainError(f"theta must lie in (0, 1], got {theta}")

    U = 16
    while tail(U)[1] > tolerance / 10:
        U *= 2
        if U > settings.max_terms:
            raise ConvergenceError(
                f"dilated sawtooth tail above {tolerance / 10:g} at U={U}",
                achieved_bound=tail(U)[1],
            )
    lower = theta / U
    extra = [e for e in extra_edges if lower < e < 1.0]
    edges = np.unique(np.concatenate([theta / np.arange(U, 0, -1, dtype=float), [1.0], extra]))
    edges = edges[(edges >= lower) & (edges <= 1.0)]

    def integrand(x: np.ndarray) -> np.ndarray:
        q = theta / x
        return (q - np.floor(q)) * f(x)

    spec = QuadratureSpec(abs_tol=tolerance / 10, rel_tol=1e-13)
    body = quadrature.integrate_pieces(integrand, edges, spec)
    head, head_bound = tail(U)
    logger.debug("dilated sawtooth integral", theta=theta, U=U, pieces=body.terms)
    return EvalResult(value=body.value + head, error_bound=body.error_bound + head_bound, terms=U)


def _lipschitz_tail(theta: float, antiderivative: Callable[[float], float], lipschitz: float) -> TailModel:
    def tail(U: int) -> Tuple[float, float]:
        b = theta / U
        return 0.5 * antiderivative(b), theta * theta * lipschitz / (8.0 * U ** 3)
    return tail


def _power_tail(theta: float, s: float) -> TailModel:
    """
    Tail for f(x) = x^{s-1}: in v = theta/x the integrand is {v} g(v) with
    g = theta^s v^{-s-1}, so the part beyond U is
    g-integral/2 - g(U)/12 within sup|B_3|/6 * int |g''|.
    """
    def tail(U: int) -> Tuple[float, float]:
        g_integral = theta ** s * U ** (-s) / s
        g_end = theta ** s * U ** (-s - 1.0)
        bound = _B3_SUP * (s + 1.0) * theta ** s * U ** (-s - 2.0)
        return 0.5 * g_integral - g_end / 12.0, bound
    return tail


def _power_mellin_closed(theta: float, s: float) -> float:
    return -theta / (1.0 - s) - theta ** s * riemann_zeta(s) / s


def beurling_mellin_check(theta: float, s: float, tolerance: float = 1e-8) -> IdentityReport:
    """
    int_0^1 frac(theta/x) x^{s-1} dx = -theta/(1-s) - theta^s zeta(s)/s for s > 1.
    """
    if s <= 1.0:
        raise DomainError(f"beurling_mellin_check is stated for s > 1, got {s}")
    lhs = dilated_sawtooth_integral(theta, lambda x: x ** (s - 1.0), _power_tail(theta, s), tolerance)
    rhs = _power_mellin_closed(theta, s)
    return IdentityReport.build(
        identity_id="beurling_mellin",
        lhs=lhs.value,
        rhs=rhs,
        tolerance=tolerance,
        anchor="Nyman-Beurling Mellin transform",
        details={"theta": theta, "s": s, "lhs_bound": lhs.error_bound, "U": lhs.terms},
    )


def classical_integral_check(theta: float, s: float, tolerance: float = 1e-8) -> IdentityReport:
    """
    The same Mellin transform on 0 < s < 1, where the left side still
    converges and the right side is the continuation of zeta.
    """
    if not 0.0 < s < 1.0:
        raise DomainError(f"classical_integral_check needs 0 < s < 1, got {s}")
    lhs = dilated_sawtooth_integral(theta, lambda x: x ** (s - 1.0), _power_tail(theta, s), tolerance)
    rhs = _power_mellin_closed(theta, s)
    return IdentityReport.build(
        identity_id="classical_mellin",
        lhs=lhs.value,
        rhs=rhs,
        tolerance=tolerance,
        anchor="Nyman-Beurling Mellin transform in the critical strip",
        details={"theta": theta, "s": s, "lhs_bound": lhs.error_bound, "U": lhs.terms},
    )


def hurwitz_integral_check(s: float, a: float, tolerance: float = 1e-10) -> IdentityReport:
    """
    zeta(s, a) - a^{1-s}/(s-1) - a^{-s}/2 = -s int_0^inf ({u} - 1/2)(u + a)^{-s-1} du.

    The integral runs over unit pieces up to K; beyond K it equals
    -h(K)/12 within sup|B_3|/6 * int |h''| for h = (u+a)^{-s-1}.
    """
    if s <= 0 or s == 1.0:
        raise DomainError(f"hurwitz_integral_check needs s > 0, s != 1; got {s}")
    if a <= 0:
        raise DomainError(f"hurwitz_integral_check needs a > 0, got {a}")

    def remainder(K: int) -> float:
        return _B3_SUP * (s + 1.0) * (K + a) ** (-s - 2.0)

    K = 16
    while s * remainder(K) > tolerance / 10:
        K *= 2
    edges = np.arange(0, K + 1, dtype=float)
    body = quadrature.integrate_pieces(
        lambda u: (u - np.floor(u) - 0.5) * (u + a) ** (-s - 1.0),
        edges,
        QuadratureSpec(abs_tol=tolerance / (10 * s), rel_tol=1e-13),
    )
    tail = -((K + a) ** (-s - 1.0)) / 12.0
    rhs = -s * (body.value + tail)
    zeta, zeta_bound = hurwitz_zeta_raw(s, a)
    lhs = zeta - a ** (1.0 - s) / (s - 1.0) - 0.5 * a ** (-s)
    return IdentityReport.build(
        identity_id="hurwitz_integral",
        lhs=lhs,
        rhs=rhs,
        tolerance=tolerance,
        anchor="sawtooth integral for Hurwitz zeta",
        details={"s": s, "a": a, "K": K, "zeta_bound": zeta_bound, "integral_bound": s * (body.error_bound + remainder(K))},
    )


# ---------------------------------------------------------------------------
# Decomposition formula
# ---------------------------------------------------------------------------

DECOMPOSITION_FUNCTIONS: Dict[str, DecompositionFunction] = {
    "zero": DecompositionFunction(
        name="zero",
        func=lambda x: np.zeros_like(x),
        antiderivative=lambda b: 0.0,
        over_x_antiderivative=lambda b: 0.0,
        lipschitz=0.0,
    ),
    "linear": DecompositionFunction(
        name="linear",
        func=lambda x: x,
        antiderivative=lambda b: 0.5 * b * b,
        over_x_antiderivative=lambda b: b,
        lipschitz=1.0,
    ),
    "sine": DecompositionFunction(
        name="sine",
        func=lambda x: np.sin(math.pi * x),
        antiderivative=lambda b: (1.0 - math.cos(math.pi * b)) / math.pi,
        over_x_antiderivative=lambda b: float(special.sici(math.pi * b)[0]),
        lipschitz=math.pi,
    ),
}


def decomposition_function(name: str) -> DecompositionFunction:
    try:
        return DECOMPOSITION_FUNCTIONS[name]
    except KeyError:
        raise DomainError(f"unknown decomposition function {name!r}")


def rho_decomposition_check(
    theta: float, f: Union[DecompositionFunction, str], tolerance: float = 1e-7
) -> IdentityReport:
    """
    int_0^1 frac(theta/x) f(x) dx = theta int_0^1 f(t)/t dt - sum_n n (F(theta/n) - F(theta/(n+1))).

    Beyond N the series equals theta int_0^b f/x - F(b)/2 with b = theta/(N+1),
    within theta^2 L/(8 (N+1)^3).

    Args:
        theta: Dilation in (0, 1]
        f: Decomposition function or the name of a built-in one
        tolerance: Acceptance tolerance

    Returns:
        IdentityReport
    """
    if isinstance(f, str):
        f = decomposition_function(f)
    if not 0.0 < theta <= 1.0:
        raise DomainError(f"theta must lie in (0, 1], got {theta}")

    lhs = dilated_sawtooth_integral(
        theta, f.func, _lipschitz_tail(theta, f.antiderivative, f.lipschitz), tolerance
    )

    def series_bound(N: int) -> float:
        return theta * theta * f.lipschitz / (8.0 * (N + 1) ** 3)

    N = 16
    while series_bound(N) > tolerance / 10:
        N *= 2
    n = np.arange(1, N + 1, dtype=float)
    F = np.vectorize(f.antiderivative, otypes=[float])
    head = math.fsum((n * (F(theta / n) - F(theta / (n + 1.0)))).tolist())
    b = theta / (N + 1)
    series = head + theta * f.over_x_antiderivative(b) - 0.5 * f.antiderivative(b)
    rhs = theta * f.over_x_antiderivative(1.0) - series

    return IdentityReport.build(
        identity_id=f"rho_decomposition.{f.name}",
        lhs=lhs.value,
        rhs=rhs,
        tolerance=tolerance,
        anchor="decomposition formula for the dilated sawtooth",
        details={
            "theta": theta,
            "lhs_bound": lhs.error_bound,
            "series_terms": N,
            "series_bound": series_bound(N),
        },
    )


# ---------------------------------------------------------------------------
# Fourier coefficient a_n of {theta/x}
# ---------------------------------------------------------------------------

def fourier_coeff_an(theta: float, n: int, policy: Optional[TruncationPolicy] = None) -> EvalResult:
    """
    Coefficient of frac(theta/x) against sqrt(2) sin(n pi x) on [0, 1].

    a_n = sqrt(2) (theta int_0^1 sin(n pi t)/t dt - 2/(n pi) sum_k sin^2(n pi theta/(2k)))

    Args:
        theta: Dilation in (0, 1]
        n: Index 1 <= n <= 200
        policy: Truncation policy of the sin^2 series

    Returns:
        a_n with bound
    """
    if not 1 <= n <= 200:
        raise DomainError(f"fourier_coeff_an supports 1 <= n <= 200, got {n}")
    if not 0.0 < theta <= 1.0:
        raise DomainError(f"theta must lie in (0, 1], got {theta}")
    omega = n * math.pi
    sine_integral = quadrature.integrate(
        Integrand(func=lambda t: omega * float(np.sinc(n * t)), smoothness="oscillatory", frequency=omega),
        0.0,
        1.0,
        QuadratureSpec(abs_tol=1e-13, rel_tol=1e-13),
    )
    sin2 = eval_sin2_sum(omega * theta / 2.0, policy or TruncationPolicy(tail_tolerance=1e-11))
    value = math.sqrt(2.0) * (theta * sine_integral.value - 2.0 / omega * sin2.value)
    bound = math.sqrt(2.0) * (theta * sine_integral.error_bound + 2.0 / omega * sin2.error_bound)
    return EvalResult(value=value, error_bound=bound + 4.0 * EPS * abs(value), terms=sin2.terms)


def direct_an(theta: float, n: int, tolerance: float = 1e-10) -> EvalResult:
    """sqrt(2) int_0^1 frac(theta/x) sin(n pi x) dx with breakpoints at theta/k and j/n."""
    omega = n * math.pi
    integral = dilated_sawtooth_integral(
        theta,
        lambda x: np.sin(omega * x),
        _lipschitz_tail(theta, lambda b: (1.0 - math.cos(omega * b)) / omega, omega),
        tolerance / math.sqrt(2.0),
        extra_edges=[j / n for j in range(1, n)],
    )
    return EvalResult(
        value=math.sqrt(2.0) * integral.value,
        error_bound=math.sqrt(2.0) * integral.error_bound,
        terms=integral.terms,
    )


def fourier_an_check(theta: float, n: int, tolerance: float = 1e-8) -> IdentityReport:
    """Series and direct-quadrature paths for a_n agree."""
    series = fourier_coeff_an(theta, n)
    direct = direct_an(theta, n, tolerance=tolerance / 10)
    return IdentityReport.build(
        identity_id=f"fourier_an.n{n}",
        lhs=series.value,
        rhs=direct.value,
        tolerance=tolerance,
        anchor="Fourier coefficient of the dilated sawtooth",
        details={"theta": theta, "n": n, "series_bound": series.error_bound, "direct_bound": direct.error_bound},
    )


# ---------------------------------------------------------------------------
# Pointwise Mobius inversion scan
# ---------------------------------------------------------------------------

def bod_pointwise_scan(theta: float, x: float, N: int) -> List[Tuple[int, float, float]]:
    """
    Rows (N', partial sum, target) for
    sum_{n<=N'} mu(n) (frac(theta/(n x)) - frac(theta/x)/n),
    N' running over powers of two up to N and N itself. The target is -1 on
    (0, theta] and 0 beyond.
    """
    if not 0.0 < theta <= 1.0 or not 0.0 < x <= 1.0:
        raise DomainError("bod_pointwise_scan needs theta and x in (0, 1]")
    sieve.check(N)
    mu = sieve.mobius(N)[1:].astype(float)
    exact = Fraction(theta) / Fraction(x)
    base = float(exact - math.floor(exact))
    n = np.arange(1, N + 1, dtype=float)
    q = (theta / x) / n
    frac = q - np.floor(q)
    # theta/(n x) lands on an integer only when n divides theta/x
    if exact.denominator == 1:
        hits = (int(exact) % np.arange(1, N + 1)) == 0
        frac = np.where(hits, 0.0, frac)
    partial = np.cumsum(mu * (frac - base / n))
    target = -1.0 if x <= theta else 0.0

    checkpoints = sorted({2 ** k for k in range(int(math.log2(N)) + 1)} | {N})
    return [(c, float(partial[c - 1]), target) for c in checkpoints]
