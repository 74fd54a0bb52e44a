"""
Poisson, Voronoi and Koshliakov summation formulas and the Mellin pairs behind them.
"""
import math
from typing import Callable, Dict, List, Tuple

import mpmath
import numpy as np
from scipy import special

from hlzeta.core.exceptions import DomainError, RegularizationError
from hlzeta.models.schemas import DecayHint, EvalResult, IdentityReport, Integrand, QuadratureSpec, TestFunction
from hlzeta.services import quadrature
from hlzeta.services.specfun import EPS, EULER_GAMMA, gamma_value, sieve
from hlzeta.utils.logger import logger

# Abel regularization levels, in units of the kernel frequency
ABEL_LEVELS = (0.08, 0.04, 0.02, 0.01)

STANDARD_TEST_FUNCTIONS: Dict[str, TestFunction] = {
    "gauss_pi": TestFunction(name="gauss_pi", alpha=math.pi),
    "gauss_1": TestFunction(name="gauss_1", alpha=1.0),
    "gauss_half_width": TestFunction(name="gauss_half_width", alpha=math.pi / 4.0),
}


def test_function(name: str) -> TestFunction:
    try:
        return STANDARD_TEST_FUNCTIONS[name]
    except KeyError:
        raise DomainError(f"unknown test function {name!r}")


test_function.__test__ = False


def _gaussian_sum(f: TestFunction, weight: Callable[[np.ndarray], np.ndarray] = None) -> Tuple[float, float, int]:
    """
    sum_{n>=1} w(n) f(n) with w(n) <= n, plus the tail bound A e^{-alpha N^2}/(2 alpha).
    """
    N = max(4, math.ceil(1.0 / math.sqrt(2.0 * f.alpha)))
    while f.amplitude * math.exp(-f.alpha * N * N) / (2.0 * f.alpha) > 1e-18:
        N += 1
    n = np.arange(1, N + 1, dtype=float)
    values = f(n) * (weight(n) if weight is not None else 1.0)
    tail = f.amplitude * math.exp(-f.alpha * N * N) / (2.0 * f.alpha)
    return math.fsum(values.tolist()), tail + 4.0 * EPS * float(np.sum(np.abs(values))), N


def _half_line_integral(func: Callable[[float], float], f: TestFunction, spec: QuadratureSpec, **hints) -> EvalResult:
    decay = DecayHint(rate=f.alpha / 2.0, power=2.0, constant=f.amplitude * hints.pop("envelope", 1.0))
    return quadrature.integrate(Integrand(func=func, decay=decay, **hints), 0.0, math.inf, spec)


# ---------------------------------------------------------------------------
# Poisson
# ---------------------------------------------------------------------------

def poisson_even_check(f: TestFunction, tolerance: float = 1e-9) -> IdentityReport:
    """
    sum_{n>=1} f(n) = -f(0)/2 + int_0^inf f + 2 sum_{n>=1} int_0^inf f(y) cos(2 pi n y) dy.

    The cosine integrals are summed until their Gaussian envelope
    A sqrt(pi/alpha) e^{-pi^2 n^2/alpha} drops below 1e-18.
    """
    lhs, lhs_bound, lhs_terms = _gaussian_sum(f)
    spec = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-12)

    mass = _half_line_integral(lambda y: float(f(y)), f, spec)
    rhs_parts = [-0.5 * float(f(0.0)), mass.value]
    bound = mass.error_bound

    envelope = lambda n: f.amplitude * math.sqrt(math.pi / f.alpha) * math.exp(-math.pi ** 2 * n * n / f.alpha)
    n = 1
    while True:
        omega = 2.0 * math.pi * n
        dual = _half_line_integral(
            lambda y, omega=omega: float(f(y)) * math.cos(omega * y), f, spec,
            smoothness="oscillatory", frequency=omega,
        )
        rhs_parts.append(2.0 * dual.value)
        bound += 2.0 * dual.error_bound
        n += 1
        if envelope(n) < 1e-18:
            break
    dual_tail = envelope(n) / (1.0 - math.exp(-math.pi ** 2 * (2 * n + 1) / f.alpha))
    rhs = math.fsum(rhs_parts)

    details = {
        "test_function": f.name,
        "lhs_terms": lhs_terms,
        "dual_terms": n - 1,
        "lhs_bound": lhs_bound,
        "rhs_bound": bound + dual_tail,
    }
    if math.isclose(f.alpha, math.pi) and f.amplitude == 1.0:
        details["theta_value"] = float((mpmath.jtheta(3, 0, mpmath.exp(-mpmath.pi)) - 1) / 2)

    logger.debug("poisson check", test_function=f.name, dual_terms=n - 1)
    return IdentityReport.build(
        identity_id=f"poisson.{f.name}",
        lhs=lhs,
        rhs=rhs,
        tolerance=tolerance,
        anchor="Poisson summation for even functions",
        details=details,
    )


# ---------------------------------------------------------------------------
# Voronoi
# ---------------------------------------------------------------------------

def _log_moment_closed(f: TestFunction) -> Tuple[float, float]:
    """
    int_0^inf f(x)(2 gamma + log x) dx from the Gaussian log moment and from
    Gamma'(1/2) = Gamma(1/2) psi(1/2).
    """
    A, a = f.amplitude, f.alpha
    mass = 0.5 * A * math.sqrt(math.pi / a)
    direct = 2.0 * EULER_GAMMA * mass - A * math.sqrt(math.pi) / (4.0 * math.sqrt(a)) * (EULER_GAMMA + math.log(4.0 * a))
    via_gamma = 2.0 * EULER_GAMMA * mass + A * math.sqrt(math.pi) / (4.0 * math.sqrt(a)) * (float(special.digamma(0.5)) - math.log(a))
    return direct, via_gamma


def _voronoi_dual(f: TestFunction, n: int, spec: QuadratureSpec) -> Tuple[float, float, float]:
    """
    (int f(y) K0(4 pi sqrt(n y)) dy, int f(y) Y0(4 pi sqrt(n y)) dy, bound), computed in y = u^2
    where the oscillation has the constant frequency 4 pi sqrt(n).
    """
    omega = 4.0 * math.pi * math.sqrt(n)
    U = 1.0
    while f.amplitude * math.exp(-f.alpha * U ** 4) / (2.0 * f.alpha) > 1e-17:
        U += 0.25
    tail = f.amplitude * math.exp(-f.alpha * U ** 4) / (2.0 * f.alpha)

    def kernel_pair(u: float) -> complex:
        if u == 0.0:
            return 0j
        weight = 2.0 * u * float(f(u * u))
        z = omega * u
        return complex(weight * float(special.k0(z)), weight * float(special.y0(z)))

    result = quadrature.integrate(
        Integrand(func=kernel_pair, smoothness="oscillatory", frequency=omega, complex_valued=True),
        0.0,
        U,
        spec,
    )
    value = complex(result.value)
    return value.real, value.imag, result.error_bound + 2.0 * tail


def voronoi_check(f: TestFunction, tolerance: float = 1e-6) -> IdentityReport:
    """
    sum d(n) f(n) = f(0)/4 + int_0^inf f(x)(2 gamma + log x) dx
                    + sum d(n) int_0^inf f(y)(4 K0(4 pi sqrt(ny)) - c Y0(4 pi sqrt(ny))) dy

    with c = 2 pi; the variant c = 4 is evaluated over the same range and
    reported. The dual series stops once three consecutive terms fall below
    tolerance/100.
    """
    divisors = sieve.divisor_count(2000).astype(float)
    lhs, lhs_bound, lhs_terms = _gaussian_sum(f, weight=lambda n: divisors[n.astype(int)])

    spec = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-12)
    log_moment = _half_line_integral(
        lambda x: float(f(x)) * (2.0 * EULER_GAMMA + math.log(x)) if x > 0 else 0.0,
        f, spec, envelope=2.0 * EULER_GAMMA + 1.0 / math.sqrt(math.e * f.alpha),
    )
    closed_direct, closed_gamma = _log_moment_closed(f)
    constant = 0.25 * float(f(0.0)) + log_moment.value

    terms_2pi: List[float] = []
    terms_4: List[float] = []
    dual_bound = 0.0
    small_run = 0
    n = 0
    while small_run < 3:
        n += 1
        if n >= divisors.size:
            raise DomainError("Voronoi dual series exceeded the divisor table")
        k_part, y_part, b = _voronoi_dual(f, n, spec)
        d = divisors[n]
        terms_2pi.append(d * (4.0 * k_part - 2.0 * math.pi * y_part))
        terms_4.append(d * (4.0 * k_part - 4.0 * y_part))
        dual_bound += d * (4.0 + 2.0 * math.pi) * b
        small_run = small_run + 1 if abs(terms_2pi[-1]) < tolerance / 100 else 0

    rhs = constant + math.fsum(terms_2pi)
    rhs_variant = constant + math.fsum(terms_4)
    diff_variant = abs(lhs - rhs_variant)
    winner = "2pi" if abs(lhs - rhs) <= tolerance < diff_variant else ("4" if diff_variant <= tolerance else "undecided")
    logger.debug("voronoi check", test_function=f.name, dual_terms=n, kernel=winner)

    return IdentityReport.build(
        identity_id=f"voronoi.{f.name}",
        lhs=lhs,
        rhs=rhs,
        tolerance=tolerance,
        anchor="Voronoi summation formula",
        details={
            "test_function": f.name,
            "lhs_terms": lhs_terms,
            "lhs_bound": lhs_bound,
            "dual_terms": n,
            "dual_stop": "three consecutive terms below tolerance/100",
            "dual_bound": dual_bound,
            "log_moment_quadrature": log_moment.value,
            "log_moment_closed": closed_direct,
            "log_moment_via_gamma": closed_gamma,
            "variant_4Y0_diff": diff_variant,
            "kernel_coefficient": winner,
        },
    )


# ---------------------------------------------------------------------------
# Koshliakov
# ---------------------------------------------------------------------------

def _koshliakov_side(a: float) -> Tuple[float, float, int]:
    """
    sqrt(a)(gamma - log(4 pi/a) + 4 sum d(n) K0(2 pi a n)).

    K0(x) <= sqrt(pi/(2x)) e^{-x} and d(n) <= 2 sqrt(n) bound the tail by
    4 e^{-2 pi a (N+1)} / (1 - e^{-2 pi a}).
    """
    ratio = math.exp(-2.0 * math.pi * a)

    def tail(N: int) -> float:
        return 4.0 * ratio ** (N + 1) / (1.0 - ratio)

    N = 1
    while tail(N) > 1e-17:
        N += 1
    d = sieve.divisor_count(N)[1:].astype(float)
    n = np.arange(1, N + 1, dtype=float)
    terms = d * special.k0(2.0 * math.pi * a * n)
    series = math.fsum(terms.tolist())
    value = math.sqrt(a) * (EULER_GAMMA - math.log(4.0 * math.pi / a) + 4.0 * series)
    bound = tail(N) + 8.0 * EPS * math.sqrt(a) * (abs(EULER_GAMMA) + abs(math.log(4.0 * math.pi / a)) + 4.0 * series)
    return value, bound, N


def koshliakov_check(a: float, tolerance: float = 1e-10) -> IdentityReport:
    """Koshliakov's formula; its right side is the left side at 1/a."""
    if not 0.1 <= a <= 10.0:
        raise DomainError(f"koshliakov_check supports 0.1 <= a <= 10, got {a}")
    lhs, lhs_bound, lhs_terms = _koshliakov_side(a)
    rhs, rhs_bound, rhs_terms = _koshliakov_side(1.0 / a)
    return IdentityReport.build(
        identity_id="koshliakov",
        lhs=lhs,
        rhs=rhs,
        tolerance=tolerance,
        anchor="Koshliakov formula",
        details={"a": a, "lhs_terms": lhs_terms, "rhs_terms": rhs_terms, "bound": lhs_bound + rhs_bound},
    )


# ---------------------------------------------------------------------------
# Mellin pairs
# ---------------------------------------------------------------------------

def voronoi_mellin_closed(s: float, kind: str) -> float:
    if kind == "K0":
        return 0.5 * (2.0 * math.pi) ** (-2.0 * s) * gamma_value(s) ** 2
    if kind == "Y0":
        return -(1.0 / math.pi) * (2.0 * math.pi) ** (-2.0 * s) * math.cos(math.pi * s) * gamma_value(s) ** 2
    if kind == "J0":
        return 4.0 ** s * gamma_value(s) / gamma_value(1.0 - s)
    raise DomainError(f"unknown Mellin kernel {kind!r}")


def richardson(values: List[float]) -> Tuple[float, float, List[float]]:
    """
    Extrapolate values at eps, eps/2, eps/4, ... to eps = 0 assuming integer
    powers of eps; returns (estimate, |difference of the last two levels|, diagonal).
    """
    table = [list(values)]
    for k in range(1, len(values)):
        prev = table[-1]
        factor = 2.0 ** k - 1.0
        table.append([prev[i] + (prev[i] - prev[i - 1]) / factor for i in range(1, len(prev))])
    diagonal = [row[-1] for row in table]
    return diagonal[-1], abs(diagonal[-1] - diagonal[-2]), diagonal


def _abel_integral(s: float, bessel: Callable[[float], float], omega: float, eps: float) -> EvalResult:
    """2 int_0^inf u^{2s-1} B(omega u) e^{-eps' u^2} du with eps' = eps (omega/(4 pi))^2."""
    damping = eps * (omega / (4.0 * math.pi)) ** 2
    U = 1.0
    while damping ** (-s) * float(special.gammaincc(s, damping * U * U) * special.gamma(s)) > 1e-12:
        U *= 1.25
    tail = damping ** (-s) * float(special.gammaincc(s, damping * U * U) * special.gamma(s))

    def integrand(u: float) -> float:
        if u == 0.0:
            return 0.0
        return 2.0 * u ** (2.0 * s - 1.0) * bessel(omega * u) * math.exp(-damping * u * u)

    result = quadrature.integrate(
        Integrand(func=integrand, smoothness="oscillatory", frequency=omega),
        0.0,
        U,
        QuadratureSpec(abs_tol=1e-11, rel_tol=1e-12, max_subdivisions=400),
    )
    return EvalResult(value=result.value, error_bound=result.error_bound + tail, terms=result.terms)


def voronoi_mellin_check(s: float, kind: str, tolerance: float = 1e-7) -> IdentityReport:
    """
    Mellin transforms of K0(4 pi sqrt x), Y0(4 pi sqrt x) and J0(sqrt x).

    K0 decays exponentially and goes straight through the Mellin integrator.
    Y0 and J0 converge only conditionally; they are damped by an Abel factor
    and extrapolated to zero damping.
    """
    if kind == "K0":
        if not 0.0 < s < 1.0:
            raise DomainError(f"the K0 pair is checked for 0 < s < 1, got {s}")
        g = Integrand(
            func=lambda t: float(special.k0(4.0 * math.pi * math.sqrt(t))) if t > 0 else 0.0,
            decay=DecayHint(rate=4.0 * math.pi, power=0.5, constant=1.0),
        )
        result = quadrature.mellin_integral(g, s, QuadratureSpec(abs_tol=1e-11, rel_tol=1e-12))
        lhs = result.value
        details: Dict[str, object] = {"s": s, "kind": kind, "bound": result.error_bound}
    elif kind in ("Y0", "J0"):
        limit = 0.75 if kind == "J0" else 1.0
        if not 0.0 < s < limit:
            raise DomainError(f"the {kind} pair is checked for 0 < s < {limit}, got {s}")
        if kind == "Y0":
            bessel, omega = (lambda z: float(special.y0(z))), 4.0 * math.pi
        else:
            bessel, omega = (lambda z: float(special.j0(z))), 1.0
        levels = [_abel_integral(s, bessel, omega, eps) for eps in ABEL_LEVELS]
        lhs, estimate, diagonal = richardson([r.value for r in levels])
        details = {
            "s": s,
            "kind": kind,
            "abel_levels": list(ABEL_LEVELS),
            "abel_values": [r.value for r in levels],
            "extrapolation": diagonal,
            "extrapolation_error": estimate,
        }
        if estimate > tolerance:
            logger.error("Abel extrapolation did not settle", s=s, kind=kind, estimate=estimate)
            raise RegularizationError(
                f"{kind} Mellin transform at s={s}: extrapolation error {estimate:.3g} above {tolerance:.3g}",
                levels=diagonal,
            )
    else:
        raise DomainError(f"unknown Mellin kernel {kind!r}")

    return IdentityReport.build(
        identity_id=f"voronoi_mellin.{kind}",
        lhs=lhs,
        rhs=voronoi_mellin_closed(s, kind),
        tolerance=tolerance,
        anchor="Voronoi Mellin transforms",
        details=details,
    )
