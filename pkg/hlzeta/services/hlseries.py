"""
The Hardy-Littlewood series f(x) = sum sin(x/n)/n and its relatives.

Every infinite series is summed exactly up to an index N and completed either
by a plain tail bound or, by default, by an Euler-Maclaurin tail: the
integral of the summand beyond N in closed form plus half the end term, with
the remainder bounded by (1/8) int_N^inf |g''|.
"""
import cmath
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import special

from hlzeta.core.config import settings
from hlzeta.core.exceptions import ConvergenceError, DomainError
from hlzeta.models.schemas import (
    ComplexValue,
    EvalResult,
    IdentityReport,
    PowerSeriesForm,
    QuadratureSpec,
    SeriesKind,
    TruncationPolicy,
)
from hlzeta.services import quadrature
from hlzeta.services.specfun import EPS, EULER_GAMMA, ZETA2, ein, hurwitz_zeta_raw, riemann_zeta, sieve
from hlzeta.utils.logger import logger

_CHUNK = 1 << 20

ComplexLike = Union[complex, float, ComplexValue]


def _as_complex(z: ComplexLike) -> complex:
    return z.to_complex() if isinstance(z, ComplexValue) else complex(z)


# ---------------------------------------------------------------------------
# Summation kernel
# ---------------------------------------------------------------------------

def partial_sum(term: Callable[[np.ndarray], np.ndarray], start: int, stop: int) -> Tuple[complex, float]:
    """
    Sum term(n) for start <= n <= stop in vectorised chunks.

    Returns:
        (sum, sum of absolute values)
    """
    re_parts: List[float] = []
    im_parts: List[float] = []
    abs_total = 0.0
    is_complex = False
    for lo in range(start, stop + 1, _CHUNK):
        n = np.arange(lo, min(lo + _CHUNK, stop + 1), dtype=float)
        values = term(n)
        if np.iscomplexobj(values):
            is_complex = True
            re_parts.append(float(np.sum(values.real)))
            im_parts.append(float(np.sum(values.imag)))
        else:
            re_parts.append(float(np.sum(values)))
        abs_total += float(np.sum(np.abs(values)))
    total = math.fsum(re_parts)
    if is_complex:
        return complex(total, math.fsum(im_parts)), abs_total
    return total, abs_total


def _rounding(terms: int, abs_total: float) -> float:
    return 4.0 * EPS * (math.log2(max(terms, 2)) + 2.0) * abs_total


def _em_remainder(second_derivative_integral: Callable[[int], float], N: int, complex_valued: bool) -> float:
    factor = 2.0 if complex_valued else 1.0
    return factor * second_derivative_integral(N) / 8.0


def _em_series(
    label: str,
    term: Callable[[np.ndarray], np.ndarray],
    tail_integral: Callable[[int], complex],
    g2_integral: Callable[[int], float],
    plain_tail: Callable[[int], float],
    n_start: int,
    policy: TruncationPolicy,
    arg_rounding: float = 0.0,
    complex_valued: bool = False,
) -> EvalResult:
    """
    Sum a series with the policy's tail mode.

    Args:
        label: Series name for logging
        term: Vectorised summand g(n)
        tail_integral: N -> int_N^inf g
        g2_integral: N -> bound of int_N^inf |g''|
        plain_tail: N -> bound of |sum_{n>N} g(n)|
        n_start: First candidate truncation index
        policy: Truncation policy
        arg_rounding: Bound of the error caused by rounding the argument
        complex_valued: Whether g is complex

    Returns:
        Value and bound
    """
    target = policy.tail_tolerance / 2

    if policy.tail_mode == "bound":
        N = n_start
        while plain_tail(N) > target:
            N *= 2
            if N > policy.max_terms:
                head, abs_total = partial_sum(term, 1, policy.max_terms)
                raise ConvergenceError(
                    f"{label}: plain tail needs more than {policy.max_terms} terms",
                    best_estimate=head,
                    achieved_bound=plain_tail(policy.max_terms),
                )
        head, abs_total = partial_sum(term, 1, N)
        bound = plain_tail(N) + _rounding(N, abs_total) + arg_rounding
        logger.debug("series summed", series=label, mode="bound", terms=N, bound=bound)
        return EvalResult(value=head, error_bound=bound, terms=N)

    N = n_start
    while _em_remainder(g2_integral, N, complex_valued) > target:
        N *= 2
        if N > policy.max_terms:
            raise ConvergenceError(
                f"{label}: Euler-Maclaurin tail needs more than {policy.max_terms} terms",
                achieved_bound=_em_remainder(g2_integral, policy.max_terms, complex_valued),
            )
    head, abs_total = partial_sum(term, 1, N - 1)
    end_term = complex(term(np.asarray([float(N)]))[0])
    tail = tail_integral(N) + 0.5 * end_term
    value = head + tail
    if not complex_valued:
        value = complex(value).real
    bound = (
        _em_remainder(g2_integral, N, complex_valued)
        + _rounding(N, abs_total + abs(tail))
        + arg_rounding
    )
    logger.debug("series summed", series=label, mode="euler_maclaurin", terms=N, bound=bound)
    return EvalResult(value=value, error_bound=bound, terms=N)


def _default_policy(policy: Optional[TruncationPolicy]) -> TruncationPolicy:
    return policy or TruncationPolicy()


# ---------------------------------------------------------------------------
# f(x) = sum sin(x/n)/n and relatives on the real line
# ---------------------------------------------------------------------------

def eval_f(x: float, policy: Optional[TruncationPolicy] = None) -> EvalResult:
    """
    Hardy-Littlewood series sum_{n>=1} sin(x/n)/n.

    The series is odd, so only |x| is summed and the sign applied afterwards.

    Args:
        x: Real argument, |x| < 1e12
        policy: Truncation policy

    Returns:
        Value with certified bound
    """
    policy = _default_policy(policy)
    if not abs(x) < 1e12:
        raise DomainError(f"eval_f supports |x| < 1e12, got {x}")
    if x == 0.0:
        return EvalResult(value=0.0, error_bound=0.0, terms=0)
    ax = abs(x)

    if policy.tail_mode == "bound":
        N = max(math.ceil(ax / policy.tail_tolerance), 64, 2 * math.ceil(ax))
        if N > policy.max_terms:
            head, _ = partial_sum(lambda n: np.sin(ax / n) / n, 1, policy.max_terms)
            raise ConvergenceError(
                f"eval_f({x}) needs {N} terms, policy allows {policy.max_terms}",
                best_estimate=math.copysign(head, x),
                achieved_bound=ax / policy.max_terms,
            )
        head, abs_total = partial_sum(lambda n: np.sin(ax / n) / n, 1, N)
        bound = ax / N + _rounding(N, abs_total) + 2.0 * EPS * ax * ZETA2
        result = EvalResult(value=head, error_bound=bound, terms=N)
    else:
        result = _em_series(
            "f_hl",
            term=lambda n: np.sin(ax / n) / n,
            tail_integral=lambda N: float(special.sici(ax / N)[0]),
            g2_integral=lambda N: 2.0 * ax / N ** 3 + ax ** 3 / (5.0 * N ** 5),
            plain_tail=lambda N: ax / N,
            n_start=max(64, 2 * math.ceil(ax)),
            policy=policy,
            arg_rounding=2.0 * EPS * ax * ZETA2,
        )
    if x < 0:
        return EvalResult(value=-result.value, error_bound=result.error_bound, terms=result.terms)
    return result


def eval_sin2_sum(x: float, policy: Optional[TruncationPolicy] = None) -> EvalResult:
    """sum_{n>=1} sin^2(x/n)."""
    policy = _default_policy(policy)
    ax = abs(x)
    if ax == 0.0:
        return EvalResult(value=0.0, error_bound=0.0, terms=0)

    def tail_integral(N: int) -> float:
        a = ax / N
        return ax * (float(special.sici(2.0 * a)[0]) - math.sin(a) ** 2 / a)

    n_start = max(64, 2 * math.ceil(ax))
    return _em_series(
        "sin2_sum",
        term=lambda n: np.sin(ax / n) ** 2,
        tail_integral=tail_integral,
        g2_integral=lambda N: 2.0 * ax * ax / N ** 3,
        plain_tail=lambda N: ax * ax / N,
        n_start=n_start,
        policy=policy,
        arg_rounding=2.0 * EPS * ax * (math.log(n_start) + 1.0),
    )


def _eval_f_cos(x: float, policy: TruncationPolicy) -> EvalResult:
    """F(x) = sum cos(x/n)/n^2, the termwise derivative of f."""
    ax = abs(x)
    return _em_series(
        "F_cos",
        term=lambda n: np.cos(ax / n) / n ** 2,
        tail_integral=lambda N: math.sin(ax / N) / ax if ax else 1.0 / N,
        g2_integral=lambda N: 2.0 / N ** 3 + 7.0 * ax * ax / (5.0 * N ** 5),
        plain_tail=lambda N: 1.0 / N,
        n_start=max(64, 2 * math.ceil(ax)),
        policy=policy,
        arg_rounding=2.0 * EPS * ax * 1.21,
    )


def _expm1c(w: complex) -> complex:
    if abs(w) < 1e-5:
        return w + w * w / 2 + w ** 3 / 6
    return cmath.exp(w) - 1.0


def _eval_g_tenenbaum(z: complex, policy: TruncationPolicy) -> EvalResult:
    """G(z) = sum e^{z/n}/n^2 for Re z <= 0."""
    if z.real > 0:
        raise DomainError(f"G(z) is summed for Re z <= 0 only, got {z}")
    az = abs(z)
    complex_valued = z.imag != 0.0

    def term(n: np.ndarray) -> np.ndarray:
        values = np.exp(z / n) / n ** 2
        return values if complex_valued else values.real

    return _em_series(
        "G_tenenbaum",
        term=term,
        tail_integral=lambda N: _expm1c(z / N) / z if az else 1.0 / N,
        g2_integral=lambda N: 2.0 / N ** 3 + 1.5 * az / N ** 4 + az * az / (5.0 * N ** 5),
        plain_tail=lambda N: 1.0 / N,
        n_start=max(64, 2 * math.ceil(az)),
        policy=policy,
        arg_rounding=2.0 * EPS * az * 1.21,
        complex_valued=complex_valued,
    )


def eval_ein_form(z: ComplexLike, policy: Optional[TruncationPolicy] = None) -> EvalResult:
    """sum_{n>=1} (1 - e^{-z/n})/n for Re z >= 0."""
    policy = _default_policy(policy)
    z = _as_complex(z)
    if z.real < 0:
        raise DomainError(f"sum (1 - e^(-z/n))/n is summed for Re z >= 0, got {z}")
    if z == 0:
        return EvalResult(value=0.0, error_bound=0.0, terms=0)
    az = abs(z)
    complex_valued = z.imag != 0.0

    def term(n: np.ndarray) -> np.ndarray:
        values = -np.expm1(-z.real / n) / n if not complex_valued else (1.0 - np.exp(-z / n)) / n
        return values

    return _em_series(
        "ein_form",
        term=term,
        tail_integral=lambda N: ein(z / N)[0] if complex_valued else ein(z / N)[0].real,
        g2_integral=lambda N: 2.0 * az / N ** 3 + az * az / (4.0 * N ** 4),
        plain_tail=lambda N: az / N,
        n_start=max(64, 2 * math.ceil(az)),
        policy=policy,
        arg_rounding=2.0 * EPS * az * ZETA2,
        complex_valued=complex_valued,
    )


# ---------------------------------------------------------------------------
# chi(s, t) = sum (-1)^n e^{-t/n} n^{-s} and chi~(s, t) = sum e^{-t/n} n^{-s}
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _h_integral(s: float, t: float, a: float, b: float) -> float:
    """int_a^b u^{-s} e^{-t/u} du on a short interval far from 0."""
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    u = mid + half * _GL_NODES
    return half * float(np.dot(_GL_WEIGHTS, u ** (-s) * np.exp(-t / u)))


def _b3_constant(s: float) -> float:
    """sup_{y>=0} e^{-y} |y^3 - 3(s+2)y^2 + 3(s+1)(s+2)y - s(s+1)(s+2)|, bounded termwise."""
    return (
        27.0 * math.exp(-3.0)
        + 12.0 * (s + 2.0) * math.exp(-2.0)
        + 3.0 * (s + 1.0) * (s + 2.0) * math.exp(-1.0)
        + s * (s + 1.0) * (s + 2.0)
    )


def _b2_constant(s: float) -> float:
    """sup_{y>=0} e^{-y} |y^2 - (2s+2)y + s(s+1)|, bounded termwise."""
    return 4.0 * math.exp(-2.0) + (2.0 * s + 2.0) * math.exp(-1.0) + s * (s + 1.0)


def chi_pairs(s: float, t: float, policy: TruncationPolicy) -> EvalResult:
    """
    chi(s, t) summed in adjacent pairs q(k) = h(2k) - h(2k-1), h(u) = u^{-s} e^{-t/u}.

    The pair integral is int_K^inf q = -(1/2) int_{2K-1}^{2K} h, and
    |q''(k)| <= 4 B3(s) (2k-1)^{-s-3}.
    """
    if s <= 0:
        raise DomainError(f"chi needs s > 0, got {s}")
    if t < 0:
        raise DomainError(f"chi needs t >= 0, got {t}")
    b3 = _b3_constant(s)

    def term(k: np.ndarray) -> np.ndarray:
        even = 2.0 * k
        odd = even - 1.0
        return even ** (-s) * np.exp(-t / even) - odd ** (-s) * np.exp(-t / odd)

    def plain_tail(K: int) -> float:
        base = 2.0 * K + 1.0
        return (s + math.exp(-1.0)) * (base ** (-s - 1.0) + base ** (-s) / (2.0 * s))

    return _em_series(
        "chi",
        term=term,
        tail_integral=lambda K: -0.5 * _h_integral(s, t, 2.0 * K - 1.0, 2.0 * K),
        g2_integral=lambda K: 4.0 * b3 * (2.0 * K - 1.0) ** (-s - 2.0) / (2.0 * (s + 2.0)),
        plain_tail=plain_tail,
        n_start=max(64, math.ceil(t)),
        policy=policy,
        arg_rounding=2.0 * EPS * t * 1.21,
    )


def chi_tilde(s: float, t: float, policy: TruncationPolicy) -> EvalResult:
    """chi~(s, t) = sum_{n>=1} n^{-s} e^{-t/n} for s > 1."""
    if s <= 1:
        raise DomainError(f"chi_tilde needs s > 1, got {s}")
    if t < 0:
        raise DomainError(f"chi_tilde needs t >= 0, got {t}")
    b2 = _b2_constant(s)

    def tail_integral(N: int) -> float:
        if t == 0.0 or t / N < 1e-300:
            return N ** (1.0 - s) / (s - 1.0)
        return t ** (1.0 - s) * float(special.gamma(s - 1.0) * special.gammainc(s - 1.0, t / N))

    return _em_series(
        "chi_tilde",
        term=lambda n: n ** (-s) * np.exp(-t / n),
        tail_integral=tail_integral,
        g2_integral=lambda N: b2 * N ** (-s - 1.0) / (s + 1.0),
        plain_tail=lambda N: N ** (1.0 - s) / (s - 1.0),
        n_start=max(64, 2 * math.ceil(t)),
        policy=policy,
        arg_rounding=2.0 * EPS * t * 1.21,
    )


# ---------------------------------------------------------------------------
# Zeta power series
# ---------------------------------------------------------------------------

def _zeta_power_series(coeff: Callable[[int], Tuple[float, int]], z: complex, start: int) -> EvalResult:
    """
    sum_k c_k z^{e_k} with |c_k| <= 2 / e_k!, stopped once the geometric tail
    2 |z|^e / e! / (1 - |z|) falls below 1e-17.
    """
    az = abs(z)
    total = 0j
    abs_total = 0.0
    k = start
    while True:
        c, e = coeff(k)
        term = c * z ** e
        total += term
        abs_total += abs(term)
        c_next, e_next = coeff(k + 1)
        tail = 2.0 * az ** e_next / math.factorial(e_next) / (1.0 - az)
        if tail < 1e-17 or k > 200:
            break
        k += 1
    bound = tail + 8.0 * EPS * abs_total
    value = total if z.imag != 0.0 else total.real
    return EvalResult(value=value, error_bound=bound, terms=k - start + 1)


def eval_power_series(form: Union[PowerSeriesForm, str], z: ComplexLike) -> EvalResult:
    """
    zeta-coefficient expansions of f, sum (1 - cos(x/n))/n and sum (1 - e^{-z/n})/n.

    Args:
        form: sin_form, onemcos_form or exp_form
        z: |z| < 1

    Returns:
        Value with geometric tail bound
    """
    form = PowerSeriesForm(form)
    z = _as_complex(z)
    if not abs(z) < 1.0:
        raise DomainError(f"zeta power series need |z| < 1, got {abs(z)}")
    if z == 0:
        return EvalResult(value=0.0, error_bound=0.0, terms=0)

    if form is PowerSeriesForm.SIN_FORM:
        def coeff(j: int) -> Tuple[float, int]:
            e = 2 * j + 1
            return (-1) ** j * riemann_zeta(2 * j + 2) / math.factorial(e), e
        return _zeta_power_series(coeff, z, 0)

    if form is PowerSeriesForm.ONEMCOS_FORM:
        def coeff(k: int) -> Tuple[float, int]:
            e = 2 * k
            return (-1) ** (k - 1) * riemann_zeta(2 * k + 1) / math.factorial(e), e
        return _zeta_power_series(coeff, z, 1)

    def coeff(k: int) -> Tuple[float, int]:
        return -((-1) ** k) * riemann_zeta(k + 1) / math.factorial(k), k
    return _zeta_power_series(coeff, z, 1)


def _nu_start(nu: float) -> int:
    """Smallest integer n with n > nu + 1."""
    return math.floor(nu + 1.0) + 1


def g_nu_series(nu: float, z: ComplexLike) -> EvalResult:
    """
    G_nu(z) = sum_{n > nu+1} zeta(n - nu) (-z)^n / n!.

    The tail uses zeta(n - nu) <= zeta(N + 1 - nu) for n > N.
    """
    z = _as_complex(z)
    if not abs(z) < 1.0:
        raise DomainError(f"G_nu needs |z| < 1, got {abs(z)}")
    n0 = _nu_start(nu)
    if z == 0:
        return EvalResult(value=0.0, error_bound=0.0, terms=0)
    az = abs(z)
    total = 0j
    abs_total = 0.0
    n = n0
    while True:
        term = riemann_zeta(n - nu) * (-z) ** n / math.factorial(n)
        total += term
        abs_total += abs(term)
        zeta_next = riemann_zeta(n + 1 - nu)
        tail = zeta_next * az ** (n + 1) / math.factorial(n + 1) / (1.0 - az / (n + 2))
        if tail < 1e-17 or n > n0 + 200:
            break
        n += 1
    value = total if z.imag != 0.0 else total.real
    return EvalResult(value=value, error_bound=tail + 8.0 * EPS * abs_total, terms=n - n0 + 1)


def g_nu_direct(nu: float, z: ComplexLike, M: int = 100_000) -> EvalResult:
    """
    Direct oracle sum_m m^nu (e^{-z/m} - sum_{n<n0} (-z/m)^n/n!) for G_nu.

    The tail beyond M is estimated by its leading term through Hurwitz zeta;
    the rest is bounded by e^{|z|/M} |z|^{n0+1}/(n0+1)! M^{nu-n0}/(n0-nu).
    """
    z = _as_complex(z)
    n0 = _nu_start(nu)
    az = abs(z)
    if z == 0:
        return EvalResult(value=0.0, error_bound=0.0, terms=0)

    def term(m: np.ndarray) -> np.ndarray:
        w = -z / m
        head = np.zeros_like(m, dtype=complex)
        power = np.ones_like(m, dtype=complex)
        for n in range(n0):
            head += power / math.factorial(n)
            power = power * w
        # e^w minus its Taylor head; direct subtraction cancels for small w,
        # so use the remaining series once |w| is small
        small = np.abs(w) < 0.5
        remainder = np.exp(w) - head
        if np.any(small):
            ws = w[small]
            acc = np.zeros_like(ws)
            p = ws ** n0 / math.factorial(n0)
            k = n0
            while True:
                acc += p
                k += 1
                p = p * ws / k
                if np.max(np.abs(p)) < 1e-18 * max(np.max(np.abs(acc)), 1e-300):
                    break
            remainder[small] = acc
        return m ** nu * remainder

    head, abs_total = partial_sum(term, 1, M)
    lead = ((-z) ** n0 / math.factorial(n0)) * hurwitz_zeta_raw(n0 - nu, M + 1.0)[0]
    rest = (
        math.exp(az / M) * az ** (n0 + 1) / math.factorial(n0 + 1)
        * M ** (nu - n0) / (n0 - nu)
    )
    value = complex(head) + lead
    if z.imag == 0.0:
        value = value.real
    return EvalResult(value=value, error_bound=rest + _rounding(M, abs_total), terms=M)


# ---------------------------------------------------------------------------
# Dispatcher
# ---------------------------------------------------------------------------

def eval_series(
    kind: Union[SeriesKind, str],
    arg: ComplexLike,
    s: Optional[float] = None,
    nu: Optional[float] = None,
    policy: Optional[TruncationPolicy] = None,
) -> EvalResult:
    """
    Evaluate any of the series kinds at a point.

    Args:
        kind: Series kind
        arg: Argument (x, t or z)
        s: Exponent for chi and chi_tilde
        nu: Index for G_nu
        policy: Truncation policy

    Returns:
        Value with certified bound
    """
    kind = SeriesKind(kind)
    policy = _default_policy(policy)
    z = _as_complex(arg)

    def real_arg() -> float:
        if z.imag != 0.0:
            raise DomainError(f"{kind.value} takes a real argument, got {z}")
        return z.real

    if kind is SeriesKind.F_HL:
        return eval_f(real_arg(), policy)
    if kind is SeriesKind.F_COS:
        return _eval_f_cos(real_arg(), policy)
    if kind is SeriesKind.SIN2_SUM:
        return eval_sin2_sum(real_arg(), policy)
    if kind is SeriesKind.G_TENENBAUM:
        return _eval_g_tenenbaum(z, policy)
    if kind is SeriesKind.CHI:
        if s is None:
            raise DomainError("chi needs s")
        return chi_pairs(s, real_arg(), policy)
    if kind is SeriesKind.CHI_TILDE:
        if s is None:
            raise DomainError("chi_tilde needs s")
        return chi_tilde(s, real_arg(), policy)
    if nu is None:
        raise DomainError("G_nu needs nu")
    return g_nu_series(nu, z)


def eval_named(
    kind: str,
    arg: ComplexLike,
    s: Optional[float] = None,
    nu: Optional[float] = None,
    policy: Optional[TruncationPolicy] = None,
) -> EvalResult:
    """Evaluate a series kind or a power-series form given by name."""
    if kind in {form.value for form in PowerSeriesForm}:
        return eval_power_series(kind, arg)
    if kind not in {k.value for k in SeriesKind}:
        known = sorted([k.value for k in SeriesKind] + [f.value for f in PowerSeriesForm])
        raise DomainError(f"unknown series kind {kind!r}; expected one of {', '.join(known)}")
    return eval_series(kind, arg, s=s, nu=nu, policy=policy)


# ---------------------------------------------------------------------------
# Davenport's relation and Mobius exponential sums
# ---------------------------------------------------------------------------

def centered_sawtooth_array(y: np.ndarray) -> np.ndarray:
    frac = y - np.floor(y)
    return np.where(frac == 0.0, 0.0, frac - 0.5)


def davenport_sum(x: float, N: int) -> float:
    """sum_{n<=N} mu(n)/n {n x} with the centered sawtooth."""
    mu = sieve.mobius(N)[1:].astype(float)
    n = np.arange(1, N + 1, dtype=float)
    return math.fsum((mu / n * centered_sawtooth_array(n * x)).tolist())


def davenport_scan(x_grid: Sequence[float], N_grid: Sequence[int]) -> List[Tuple[float, int, float, float, float]]:
    """Rows (x, N, partial sum, target -sin(2 pi x)/pi, |difference|)."""
    N_max = max(N_grid)
    mu = sieve.mobius(N_max)[1:].astype(float)
    n = np.arange(1, N_max + 1, dtype=float)
    rows = []
    for x in x_grid:
        partial = np.cumsum(mu / n * centered_sawtooth_array(n * x))
        target = -math.sin(2.0 * math.pi * x) / math.pi
        for N in N_grid:
            value = float(partial[N - 1])
            rows.append((float(x), int(N), value, target, abs(value - target)))
    return rows


def mobius_exp_scan(y_grid: Sequence[int], x_grid: Sequence[float]) -> List[Tuple[int, float, float]]:
    """
    Rows (y, max_x |sum_{n<=y} mu(n) e^{2 i pi n x}| / y, maximising x).
    """
    y_sorted = sorted(int(y) for y in y_grid)
    y_max = y_sorted[-1]
    mu = sieve.mobius(y_max)[1:].astype(float)
    n = np.arange(1, y_max + 1, dtype=float)
    picks = np.asarray(y_sorted) - 1
    best = np.zeros(len(y_sorted))
    best_x = np.zeros(len(y_sorted))
    for x in x_grid:
        partial = np.abs(np.cumsum(mu * np.exp(2j * math.pi * n * x)))[picks] / np.asarray(y_sorted)
        better = partial > best
        best[better] = partial[better]
        best_x[better] = x
    return [(y, float(b), float(bx)) for y, b, bx in zip(y_sorted, best, best_x)]


def mertens_column(y_grid: Sequence[int]) -> List[Tuple[int, float]]:
    """Rows (y, |M(y)|/y) by direct Mertens summation."""
    rows = []
    for y in y_grid:
        m = int(np.sum(sieve.mobius(int(y))[1:], dtype=np.int64))
        rows.append((int(y), abs(m) / y))
    return rows


# ---------------------------------------------------------------------------
# Mean value of G on the imaginary axis
# ---------------------------------------------------------------------------

def g_mean_check(n: int, K: int, tolerance: Optional[float] = None) -> IdentityReport:
    """
    Compare (1/K) sum_{k<=K} G(2 i pi n k) with sum_{d | n} d^{-2}.

    The finite average is formed exactly through
    sum_m m^{-2} (1/K) sum_k e^{2 i pi n k / m}, whose inner sum is geometric.
    The tolerance is the averaging bound, which decays like log(n)/K.
    """
    if not (1 <= n <= 1000 and 1 <= K <= 100_000):
        raise DomainError("g_mean_check needs n <= 1e3 and K <= 1e5")

    M = 20 * K
    m = np.arange(1, M + 1, dtype=float)
    theta = 2.0 * math.pi * n / m
    divides = (n % np.arange(1, M + 1)) == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.exp(1j * theta) * (1.0 - np.exp(1j * K * theta)) / (K * (1.0 - np.exp(1j * theta)))
    average = np.where(divides, 1.0 + 0j, ratio)
    terms = average / m ** 2
    lhs = complex(math.fsum(terms.real.tolist()), math.fsum(terms.imag.tolist()))
    lhs_bound = 1.0 / M + _rounding(M, float(np.sum(np.abs(terms))))

    rhs = math.fsum(1.0 / d ** 2 for d in range(1, n + 1) if n % d == 0)
    averaging = (1.0 + math.log(2 * n)) / (2.0 * K) + (1.0 + math.log(n * K)) / (2.0 * n * K) + 1.0 / (n * K)

    details: Dict[str, object] = {
        "n": n,
        "K": K,
        "averaging_bound": averaging,
        "truncation_bound": lhs_bound,
    }
    if n * K <= 200:
        direct = [
            _eval_g_tenenbaum(complex(0.0, 2.0 * math.pi * n * k), TruncationPolicy(tail_tolerance=1e-10))
            for k in range(1, K + 1)
        ]
        direct_mean = sum(complex(r.value) for r in direct) / K
        details["direct_average"] = direct_mean
        details["direct_average_diff"] = abs(direct_mean - lhs)

    return IdentityReport.build(
        identity_id=f"g_mean.n{n}",
        lhs=lhs,
        rhs=rhs,
        tolerance=tolerance or (averaging + lhs_bound),
        anchor="mean value of G on the imaginary axis",
        details=details,
    )


# ---------------------------------------------------------------------------
# Delange construction and Saffari scan
# ---------------------------------------------------------------------------

def _delange_weights(test_fn: str, upto: int) -> np.ndarray:
    if test_fn in ("sin", "constant"):
        return np.ones(upto, dtype=float)
    if test_fn.startswith("char:"):
        key = test_fn[len("char:"):]
        table = settings.dirichlet_characters.get(key)
        if table is None:
            raise DomainError(f"no Dirichlet character table for {key!r}")
        values = np.asarray(table, dtype=float)
        return values[np.arange(1, upto + 1) % values.size]
    raise DomainError(f"unknown Delange test function {test_fn!r}")


def delange_check(x: float, test_fn: str = "sin", tolerance: float = 1e-9) -> IdentityReport:
    """
    sum_{n<=x} (w(n)/n)(f(2 pi x/n) - f(2 pi)) = -2 pi int_0^1 Theta(u) f'(2 pi u) du.

    Theta(u) = sum_{n<=x, frac(x/n) < u} w(n)/n is a step function with jumps
    at frac(x/n); the quadrature breaks at every jump.

    Args:
        x: Real x >= 10
        test_fn: "sin", "constant" or "char:N:index" (f = sin weighted by a character)
        tolerance: Acceptance tolerance on top of the quadrature bound

    Returns:
        IdentityReport with sup |Theta/log x - u| recorded for w = 1
    """
    if x < 10:
        raise DomainError(f"delange_check needs x >= 10, got {x}")
    N = math.floor(x)
    w = _delange_weights(test_fn, N)
    n = np.arange(1, N + 1, dtype=float)
    r = np.mod(x / n, 1.0)
    weight = w / n

    if test_fn == "constant":
        return IdentityReport.build(
            identity_id=f"delange.{test_fn}",
            lhs=0.0,
            rhs=0.0,
            tolerance=tolerance,
            anchor="Delange identity",
            details={"x": x, "degenerate": True},
        )

    lhs = math.fsum((weight * np.sin(2.0 * math.pi * r)).tolist())

    order = np.argsort(r, kind="stable")
    jumps = r[order]
    cum = np.concatenate([[0.0], np.cumsum(weight[order])])

    def theta_times_fprime(u: np.ndarray) -> np.ndarray:
        # Theta(u) counts jumps strictly below u
        steps = cum[np.searchsorted(jumps, u, side="left")]
        return steps * np.cos(2.0 * math.pi * u)

    edges = np.unique(np.concatenate([[0.0], jumps[(jumps > 0.0) & (jumps < 1.0)], [1.0]]))
    spec = QuadratureSpec(abs_tol=1e-11, rel_tol=1e-12)
    integral = quadrature.integrate_pieces(theta_times_fprime, edges, spec)
    rhs = -2.0 * math.pi * integral.value

    details: Dict[str, object] = {
        "x": x,
        "test_fn": test_fn,
        "pieces": integral.terms,
        "quadrature_bound": integral.error_bound,
    }
    if test_fn == "sin":
        log_x = math.log(x)
        left = cum[:-1] / log_x
        right = cum[1:] / log_x
        details["sup_theta_minus_u"] = float(max(np.max(np.abs(left - jumps)), np.max(np.abs(right - jumps))))
        details["saffari_ratio"] = abs(lhs) / log_x ** (2.0 / 3.0)

    return IdentityReport.build(
        identity_id=f"delange.{test_fn}",
        lhs=lhs,
        rhs=rhs,
        tolerance=tolerance + 2.0 * math.pi * integral.error_bound,
        anchor="Delange identity",
        details=details,
    )


def saffari_scan(x_grid: Sequence[float]) -> Tuple[List[Tuple[float, float, float, float, float]], float]:
    """
    Rows (x, lhs, (log x)^{2/3}, |lhs|/(log x)^{2/3}, sup|theta - u|) and the fitted C.
    """
    rows = []
    for x in x_grid:
        report = delange_check(float(x), "sin")
        scale = math.log(x) ** (2.0 / 3.0)
        lhs = complex(report.lhs).real
        rows.append((float(x), lhs, scale, abs(lhs) / scale, float(report.details["sup_theta_minus_u"])))
    fitted = max(row[3] for row in rows) if rows else 0.0
    return rows, fitted


# ---------------------------------------------------------------------------
# Growth scan
# ---------------------------------------------------------------------------

def growth_envelope(x: float, epsilon: float) -> float:
    """(log x)^{3/4} (log log x)^{3/4 + epsilon}, zero where log log x <= 0."""
    if x <= math.e:
        return 0.0
    return math.log(x) ** 0.75 * math.log(math.log(x)) ** (0.75 + epsilon)


def growth_scan(
    x_grid: Sequence[float], epsilon: float = 0.1, policy: Optional[TruncationPolicy] = None
) -> List[Tuple[float, float, float, float, float]]:
    """Rows (x, f(x), bound, running max |f|, envelope)."""
    policy = policy or TruncationPolicy(tail_tolerance=1e-9)
    rows = []
    running = 0.0
    for x in sorted(float(v) for v in x_grid):
        result = eval_f(x, policy)
        running = max(running, abs(result.value))
        rows.append((x, float(result.value), result.error_bound, running, growth_envelope(x, epsilon)))
    return rows


def chi_split_check(s: float, t: float, policy: Optional[TruncationPolicy] = None) -> IdentityReport:
    """
    chi(s, t) + chi~(s, t) = 2^{1-s} chi~(s, t/2), from splitting even and odd n.

    The form with chi~(s/2, t) found in the literature does not survive the
    split and is recorded as such.
    """
    policy = _default_policy(policy)
    alternating = chi_pairs(s, t, policy)
    plain = chi_tilde(s, t, policy)
    halved = chi_tilde(s, t / 2.0, policy)
    lhs = alternating.value + plain.value
    rhs = 2.0 ** (1.0 - s) * halved.value
    bound = alternating.error_bound + plain.error_bound + 2.0 ** (1.0 - s) * halved.error_bound
    return IdentityReport.build(
        identity_id="chi_split",
        lhs=lhs,
        rhs=rhs,
        tolerance=max(bound, 1e-15),
        anchor="even/odd split of chi",
        details={"s": s, "t": t, "printed_variant": "2^(1-s) chi~(s/2, t) - chi~(s, t)", "printed_variant_status": "suspected typo"},
    )


# ---------------------------------------------------------------------------
# Limit of sum sin^2(x/n) and the zeta power series against direct sums
# ---------------------------------------------------------------------------

def sin2_limit_check(x: float) -> IdentityReport:
    """
    sum sin^2(x/n) / x against pi/2.

    The Riemann-sum error is at most 2 sqrt(x) + 2 (split at n = sqrt(x)),
    so the tolerance is (2 sqrt(x) + 2)/x plus the summation bound.
    """
    if x < 1.0:
        raise DomainError(f"sin2_limit_check needs x >= 1, got {x}")
    result = eval_sin2_sum(x, TruncationPolicy(tail_tolerance=1e-6))
    envelope = (2.0 * math.sqrt(x) + 2.0) / x
    return IdentityReport.build(
        identity_id="sin2_limit",
        lhs=result.value / x,
        rhs=math.pi / 2.0,
        tolerance=envelope + result.error_bound / x,
        anchor="limit of sum sin^2(x/n)/x",
        details={"x": x, "terms": result.terms, "envelope": envelope},
    )


def _eval_onemcos(x: float, policy: TruncationPolicy) -> EvalResult:
    """sum (1 - cos(x/n))/n, summed as 2 sin^2(x/2n)/n."""
    ax = abs(x)
    if ax == 0.0:
        return EvalResult(value=0.0, error_bound=0.0, terms=0)

    def tail_integral(N: int) -> float:
        # Cin(a) = int_0^a (1 - cos u)/u du
        a = ax / N
        if a < 1e-2:
            return a * a / 4.0 - a ** 4 / 96.0 + a ** 6 / 4320.0
        return EULER_GAMMA + math.log(a) - float(special.sici(a)[1])

    return _em_series(
        "onemcos",
        term=lambda n: 2.0 * np.sin(ax / (2.0 * n)) ** 2 / n,
        tail_integral=tail_integral,
        g2_integral=lambda N: 3.0 * ax * ax / N ** 4,
        plain_tail=lambda N: ax * ax / (4.0 * N * N),
        n_start=max(64, 2 * math.ceil(ax)),
        policy=policy,
        arg_rounding=2.0 * EPS * ax * ax * ZETA2,
    )


def power_series_check(form: Union[PowerSeriesForm, str], z: ComplexLike, tolerance: float = 1e-10) -> IdentityReport:
    """
    Direct sum against its zeta-coefficient expansion.

    sin_form and onemcos_form take real arguments; exp_form takes Re z >= 0.
    """
    form = PowerSeriesForm(form)
    zc = _as_complex(z)
    policy = TruncationPolicy(tail_tolerance=tolerance / 100.0)
    if form is PowerSeriesForm.EXP_FORM:
        direct = eval_ein_form(zc, policy)
    else:
        if zc.imag != 0.0:
            raise DomainError(f"{form.value} is checked on the real line, got {zc}")
        direct = eval_f(zc.real, policy) if form is PowerSeriesForm.SIN_FORM else _eval_onemcos(zc.real, policy)
    expansion = eval_power_series(form, zc)
    return IdentityReport.build(
        identity_id=f"power_series.{form.value}",
        lhs=direct.value,
        rhs=expansion.value,
        tolerance=tolerance,
        anchor="zeta power series of the Hardy-Littlewood sums",
        details={
            "z": ComplexValue.of(zc).model_dump(),
            "direct_bound": direct.error_bound,
            "series_bound": expansion.error_bound,
            "direct_terms": direct.terms,
        },
    )
