"""
Theta-function and lattice-sum identities.

Covers the cube of theta_4 (direct and Lambert-type forms), the alternating
Epstein sums of the ternary forms q1 = u^2+v^2+w^2 and q2 = uv+vw+wu, the
accelerated chi(1/2, t), the Bessel-series identities for sums of
1 - cos(z/k) and (1 - e^{-z/n})/n, and a few Mellin transforms of powers of chi.
"""
import cmath
import math
from typing import Optional, Tuple, Union

import numpy as np
from scipy import special

from hlzeta.core.config import settings
from hlzeta.core.exceptions import BranchError, ConvergenceError, DomainError
from hlzeta.models.schemas import (
    ComplexValue,
    DecayHint,
    EvalResult,
    IdentityReport,
    Integrand,
    QuadratureSpec,
    TernaryForm,
    TruncationPolicy,
)
from hlzeta.services import quadrature
from hlzeta.services.hlseries import (
    chi_pairs,
    chi_tilde,
    eval_ein_form,
    eval_sin2_sum,
    g_nu_direct,
    g_nu_series,
    partial_sum,
)
from hlzeta.services.specfun import EPS, EULER_GAMMA, eta_raw, gamma_value, hurwitz_zeta_raw, riemann_zeta, sieve
from hlzeta.utils.logger import logger

ComplexLike = Union[complex, float, ComplexValue]

# sup |B_6 - B~_6(t)| / 6! = 2|B_6| / 6!
_EM6_CONSTANT = 1.0 / 15120.0

# Truncation policy for chi values used inside Mellin integrands
_CHI_POLICY = TruncationPolicy(tail_tolerance=1e-13)


# ---------------------------------------------------------------------------
# theta_4 and its cube
# ---------------------------------------------------------------------------

def _check_q(q: float) -> float:
    if not 0.0 < q < 0.999:
        raise DomainError(f"theta functions are evaluated for 0 < q < 0.999, got {q}")
    return float(q)


def theta4_t(t: float) -> float:
    """
    theta_4(e^{-t}) for t > 0.

    Large t uses the defining series, small t the Jacobi-transformed one
    sqrt(pi/t) * 2 sum_{n>=0} e^{-pi^2 (n+1/2)^2 / t}.
    """
    if t <= 0.0:
        raise DomainError(f"theta_4(e^-t) needs t > 0, got {t}")
    if t >= 1.0:
        n = np.arange(1, math.isqrt(int(40.0 / t)) + 3, dtype=float)
        return 1.0 + 2.0 * float(np.sum((-1.0) ** n * np.exp(-t * n * n)))
    n = np.arange(0, math.isqrt(int(4.0 * t)) + 4, dtype=float)
    return math.sqrt(math.pi / t) * 2.0 * float(np.sum(np.exp(-(math.pi ** 2) * (n + 0.5) ** 2 / t)))


def _theta4_direct(q: float, tol: float) -> Tuple[float, float, int]:
    N = 1
    while 2.0 * q ** ((N + 1) ** 2) / (1.0 - q) > tol:
        N += 1
    n = np.arange(1, N + 1, dtype=float)
    value = 1.0 + 2.0 * math.fsum(((-1.0) ** n * q ** (n * n)).tolist())
    return value, 2.0 * q ** ((N + 1) ** 2) / (1.0 - q) + 4.0 * EPS, N


def _theta4_cubed_andrews(q: float, tol: float) -> Tuple[float, float, int]:
    """
    1 + 4 sum (-1)^n q^n/(1+q^n) - 2 sum_{n>=1} sum_{|j|<n} (-1)^j q^{n^2-j^2} (1-q^n)/(1+q^n).

    With m = n - |j| the exponent n^2 - j^2 = m(2n - m) >= mn, so block n is
    at most 3 q^n/(1 - q^n) and the truncation after N blocks costs at most
    10 q^{N+1} / ((1-q)(1-q^{N+1})). Inner terms with exponent above E are
    dropped, each below q^E.
    """
    log_q = math.log(q)

    def tail(N: int) -> float:
        return 10.0 * q ** (N + 1) / ((1.0 - q) * (1.0 - q ** (N + 1)))

    N = 1
    while tail(N) > tol / 2:
        N += 1
    E = math.ceil(math.log(tol / (8.0 * N * N)) / log_q)

    n_all = np.arange(1, N + 1, dtype=float)
    qn = q ** n_all
    lambert = 4.0 * math.fsum(((-1.0) ** n_all * qn / (1.0 + qn)).tolist())

    blocks = []
    for n in range(1, N + 1):
        m_max = n
        if n * n > E:
            # m(2n - m) <= E  <=>  m <= n - sqrt(n^2 - E)
            m_max = min(n, int(n - math.sqrt(n * n - E)))
        if m_max < 1:
            continue
        m = np.arange(1, m_max + 1, dtype=float)
        j = n - m
        weights = np.where(j == 0, 1.0, 2.0) * (-1.0) ** j
        block = float(np.sum(weights * np.exp(log_q * m * (2.0 * n - m))))
        blocks.append(block * (1.0 - q ** n) / (1.0 + q ** n))
    value = 1.0 + lambert - 2.0 * math.fsum(blocks)
    bound = tail(N) + 8.0 * N * N * q ** E + 16.0 * EPS * (1.0 + abs(lambert) + 2.0 * sum(abs(b) for b in blocks))
    return value, bound, N


def theta4_cubed(q: float, method: str = "andrews", tol: float = 1e-15) -> EvalResult:
    """
    theta_4(q)^3 for 0 < q < 0.999.

    Args:
        q: Nome
        method: "direct_cube" or "andrews"
        tol: Truncation target

    Returns:
        Value with the truncation and rounding bound
    """
    q = _check_q(q)
    if method == "direct_cube":
        theta, bound, N = _theta4_direct(q, tol)
        value = theta ** 3
        return EvalResult(value=value, error_bound=3.0 * theta * theta * bound + bound ** 3 + 4.0 * EPS * abs(value), terms=N)
    if method == "andrews":
        value, bound, N = _theta4_cubed_andrews(q, tol)
        return EvalResult(value=value, error_bound=bound, terms=N)
    raise DomainError(f"unknown theta method {method!r}")


def theta4_cubed_coefficients(n_max: int, method: str = "andrews") -> np.ndarray:
    """Integer power-series coefficients of theta_4^3 up to q^{n_max}."""
    if n_max < 1:
        raise DomainError(f"n_max must be positive, got {n_max}")
    size = n_max + 1
    if method == "direct_cube":
        theta = np.zeros(size, dtype=np.int64)
        theta[0] = 1
        for k in range(1, math.isqrt(n_max) + 1):
            theta[k * k] = 2 * (-1) ** k
        return np.convolve(np.convolve(theta, theta)[:size], theta)[:size]
    if method != "andrews":
        raise DomainError(f"unknown theta method {method!r}")

    coeff = np.zeros(size, dtype=np.int64)
    coeff[0] = 1
    # (-1)^n q^n / (1 + q^n) = (-1)^n sum_{k>=1} (-1)^{k-1} q^{nk}
    for n in range(1, n_max + 1):
        for k in range(1, n_max // n + 1):
            coeff[n * k] += 4 * (-1) ** n * (-1) ** (k - 1)
    # q^e (1 - q^n)/(1 + q^n) = q^e (1 + 2 sum_{k>=1} (-1)^k q^{nk})
    for n in range(1, n_max + 1):
        for j in range(-(n - 1), n):
            e = n * n - j * j
            if e > n_max:
                continue
            sign = (-1) ** abs(j)
            coeff[e] -= 2 * sign
            for k in range(1, (n_max - e) // n + 1):
                coeff[e + n * k] -= 4 * sign * (-1) ** k
    return coeff


def theta4_cubed_check(q: float, tolerance: float = 1e-12) -> IdentityReport:
    """Direct cube of theta_4 against the Lambert-type double series."""
    direct = theta4_cubed(q, "direct_cube")
    andrews = theta4_cubed(q, "andrews")
    return IdentityReport.build(
        identity_id="theta4_cubed",
        lhs=direct.value,
        rhs=andrews.value,
        tolerance=tolerance,
        anchor="Andrews' lemma for the cube of theta_4",
        details={"q": q, "direct_terms": direct.terms, "andrews_blocks": andrews.terms,
                 "bound": direct.error_bound + andrews.error_bound},
    )


def theta_coefficients_check(n_max: int = 200) -> IdentityReport:
    """Coefficients of theta_4^3 from both expansions against (-1)^n r_3(n)."""
    r3 = sieve.r3(n_max).astype(np.int64)
    expected = r3 * np.where(np.arange(n_max + 1) % 2 == 0, 1, -1)
    mismatched = []
    for method in ("direct_cube", "andrews"):
        coeff = theta4_cubed_coefficients(n_max, method)
        bad = np.nonzero(coeff != expected)[0]
        mismatched.extend((method, int(n)) for n in bad)
    return IdentityReport.build(
        identity_id="theta4_cubed.coefficients",
        lhs=float(len(mismatched)),
        rhs=0.0,
        tolerance=0.5,
        anchor="Andrews' lemma, coefficients (-1)^n r_3(n)",
        details={"n_max": n_max, "mismatches": mismatched[:20]},
    )


# ---------------------------------------------------------------------------
# chi(1/2, t) functional equation
# ---------------------------------------------------------------------------

def chi_half_accel(t: float, N_odd: Optional[int] = None, tol: float = 1e-15) -> EvalResult:
    """
    chi(1/2, t) = 2 Re( e^{i pi/4} sum_{d odd >= 1} e^{-(1-i) a sqrt(d)} / sqrt(d) ),  a = sqrt(2 pi t).

    Negative odd d contribute the complex conjugates of the positive ones.
    For decreasing terms the odd tail beyond D is below (1/a) e^{-a sqrt(D)},
    doubled by the real part.

    Args:
        t: Positive real
        N_odd: Number of odd terms; chosen from tol when omitted
        tol: Truncation target when N_odd is omitted
    """
    if t <= 0.0:
        raise DomainError(f"the accelerated chi(1/2, t) needs t > 0, got {t}")
    a = math.sqrt(2.0 * math.pi * t)
    if N_odd is None:
        root = max(1.0, math.log(2.0 / (a * tol)) / a)
        N_odd = max(1, math.ceil((root * root + 1.0) / 2.0))
    d = 2.0 * np.arange(1, N_odd + 1, dtype=float) - 1.0
    root_d = np.sqrt(d)
    terms = np.exp(-(1.0 - 1.0j) * a * root_d) / root_d
    total = complex(math.fsum(terms.real.tolist()), math.fsum(terms.imag.tolist()))
    value = 2.0 * (cmath.exp(0.25j * math.pi) * total).real
    D = float(d[-1])
    bound = (2.0 / a) * math.exp(-a * math.sqrt(D)) + 8.0 * EPS * float(np.sum(np.abs(terms)))
    return EvalResult(value=value, error_bound=bound, terms=N_odd)


def _chi(s: float, t: float) -> EvalResult:
    if s == 0.5 and t >= 0.25:
        return chi_half_accel(t)
    return chi_pairs(s, t, _CHI_POLICY)


def chi_half_check(t: float, tolerance: float = 1e-10) -> IdentityReport:
    """Alternating series chi(1/2, t) against its accelerated form."""
    direct = chi_pairs(0.5, t, _CHI_POLICY)
    accel = chi_half_accel(t)
    return IdentityReport.build(
        identity_id="chi_half",
        lhs=direct.value,
        rhs=accel.value,
        tolerance=tolerance,
        anchor="Functional equation of chi(1/2, t)",
        details={"t": t, "direct_terms": direct.terms, "accelerated_terms": accel.terms,
                 "bound": direct.error_bound + accel.error_bound},
    )


# ---------------------------------------------------------------------------
# Alternating Epstein sums
# ---------------------------------------------------------------------------

def _q1_mellin(s: float) -> EvalResult:
    # |theta_4^3 - 1| <= 25 e^{-t} for t >= 1
    g = Integrand(func=lambda t: theta4_t(t) ** 3 - 1.0 if t > 0 else -1.0,
                  decay=DecayHint(rate=1.0, power=1.0, constant=25.0))
    return quadrature.mellin_integral(g, s, QuadratureSpec(abs_tol=1e-10, rel_tol=1e-11))


def _q2_mellin(s: float) -> EvalResult:
    if s < 0.5:
        raise DomainError(f"the q2 Mellin integral is evaluated for s >= 1/2, got {s}")
    evaluation = [0.0]

    def cube(t: float) -> float:
        if t <= 0.0:
            return -eta_raw(s)[0] ** 3
        chi = _chi(s, t)
        evaluation[0] = max(evaluation[0], chi.error_bound)
        return float(chi.value) ** 3

    # |chi(s, t)| is asymptotically below 2 e^{-sqrt(2 pi t)} for s >= 1/2
    g = Integrand(func=cube, decay=DecayHint(rate=3.0 * math.sqrt(2.0 * math.pi), power=0.5, constant=9.0))
    result = quadrature.mellin_integral(g, s, QuadratureSpec(abs_tol=1e-10, rel_tol=1e-11))
    # |chi| <= 1 on the integration range, so each value carries at most 3 * eps_chi
    extra = 3.0 * evaluation[0] * 40.0 ** s / s
    return EvalResult(value=result.value, error_bound=result.error_bound + extra, terms=result.terms)


def _q1_direct(s: float, M: int) -> EvalResult:
    """Shells of u^2+v^2+w^2 up to M with r_3 from the sieve."""
    r3 = sieve.r3(M).astype(float)
    n = np.arange(1, M + 1, dtype=float)
    terms = (-1.0) ** n * r3[1:] * n ** (-s)
    value = math.fsum(terms.tolist())
    rho = math.sqrt(M) - math.sqrt(3.0)
    tail = 4.0 * math.pi * (
        rho ** (3.0 - 2.0 * s) / (2.0 * s - 3.0)
        + math.sqrt(3.0) * rho ** (2.0 - 2.0 * s) / (2.0 * s - 2.0)
        + 0.75 * rho ** (1.0 - 2.0 * s) / (2.0 * s - 1.0)
    )
    return EvalResult(value=value, error_bound=tail + 4.0 * EPS * float(np.sum(np.abs(terms))), terms=M)


def _q2_count(X: int) -> int:
    """Number of p, q, r >= 1 with pq + qr + rp <= X."""
    total = 0
    p = 1
    while 2 * p + 1 <= X:
        q = np.arange(1, (X - p) // (p + 1) + 1, dtype=np.int64)
        total += int(np.sum((X - p * q) // (p + q)))
        p += 1
    return total


def q2_triple_sum(s: float, M: int, alternating: bool = True) -> EvalResult:
    """
    sum over p, q, r >= 1 with pq + qr + rp <= M of (+-1)^{p+q+r} (pq+qr+rp)^{-s}.

    The tail uses the counting bound A(X) <= C X^{3/2}, with C measured on
    X in {M/8, M/4, M/2, M} and a 1.25 margin:
    sum_{v > M} <= s C M^{3/2-s} / (s - 3/2).
    """
    if s <= 1.5:
        raise DomainError(f"the triple sum converges absolutely only for s > 3/2, got {s}")
    partials = []
    abs_mass = 0.0
    p = 1
    while 2 * p + 1 <= M:
        q = np.arange(1, (M - p) // (p + 1) + 1, dtype=np.int64)
        r_max = (M - p * q) // (p + q)
        r_max = r_max[r_max >= 1]
        q = q[: r_max.size]
        q_rep = np.repeat(q, r_max)
        offsets = np.arange(q_rep.size) - np.repeat(np.cumsum(r_max) - r_max, r_max)
        r = offsets + 1
        v = (p * q_rep + (p + q_rep) * r).astype(float)
        weights = v ** (-s)
        if alternating:
            weights = weights * np.where((p + q_rep + r) % 2 == 0, 1.0, -1.0)
        partials.append(float(np.sum(weights)))
        abs_mass += float(np.sum(np.abs(weights)))
        p += 1

    C = 1.25 * max(_q2_count(X) / X ** 1.5 for X in (M // 8, M // 4, M // 2, M) if X >= 3)
    tail = s * C * M ** (1.5 - s) / (s - 1.5)
    logger.debug("q2 triple sum", s=s, M=M, count_constant=C, tail=tail)
    return EvalResult(value=math.fsum(partials), error_bound=tail + 8.0 * EPS * abs_mass, terms=M)


def alt_epstein(
    s: float,
    form: Union[TernaryForm, str],
    method: str = "mellin",
    cutoff: Optional[int] = None,
) -> EvalResult:
    """
    Alternating Epstein sum of a ternary form.

    q1: sum' over Z^3 of (-1)^{p+q+r} (p^2+q^2+r^2)^{-s}, as the Mellin
    transform of theta_4^3 - 1 or by shells.
    q2: sum over p, q, r >= 1 of (-1)^{p+q+r} (pq+qr+rp)^{-s}, as the Mellin
    transform of chi(s, t)^3 or by enumeration.

    Args:
        s: Real exponent (> 0 for mellin, >= 3 for direct)
        form: TernaryForm
        method: "mellin" or "direct"
        cutoff: Shell bound M for the direct method

    Returns:
        Value with its bound
    """
    form = TernaryForm(form)
    if method == "mellin":
        if s <= 0:
            raise DomainError(f"the Mellin representation needs s > 0, got {s}")
        raw = _q1_mellin(s) if form is TernaryForm.Q1 else _q2_mellin(s)
        gamma = gamma_value(s)
        value = float(np.real(raw.value)) / gamma
        return EvalResult(value=value, error_bound=raw.error_bound / gamma + 4.0 * EPS * abs(value), terms=raw.terms)
    if method == "direct":
        if s < 3:
            raise DomainError(f"direct lattice sums are used for s >= 3, got {s}")
        if form is TernaryForm.Q1:
            return _q1_direct(s, cutoff or sieve.r3_bound)
        return q2_triple_sum(s, cutoff or 50_000)
    raise DomainError(f"unknown method {method!r}")


def alt_epstein_check(s: float, form: Union[TernaryForm, str], tolerance: float = 1e-6) -> IdentityReport:
    """Mellin and direct evaluations of an alternating Epstein sum."""
    form = TernaryForm(form)
    mellin = alt_epstein(s, form, "mellin")
    direct = alt_epstein(s, form, "direct")
    return IdentityReport.build(
        identity_id=f"alt_epstein.{form.value}",
        lhs=mellin.value,
        rhs=direct.value,
        tolerance=tolerance,
        anchor="Mellin representation of alternating Epstein sums",
        details={"s": s, "mellin_bound": mellin.error_bound, "direct_bound": direct.error_bound},
    )


def crandall_relation_check(s: float, tolerance: Optional[float] = None) -> IdentityReport:
    """
    sum'(-1)^{p+q+r}(p^2+q^2+r^2)^{-s} = -6 eta(s)^2 - 4 sum (-1)^{p+q+r}(pq+qr+rp)^{-s}.
    """
    tolerance = tolerance or (1e-6 if s >= 3 else 1e-5)
    lhs = alt_epstein(s, TernaryForm.Q1, "mellin")
    q2 = alt_epstein(s, TernaryForm.Q2, "mellin")
    eta, _ = eta_raw(s)
    rhs = -6.0 * eta * eta - 4.0 * q2.value
    details = {"s": s, "q2_mellin": q2.value, "bound": lhs.error_bound + 4.0 * q2.error_bound}
    if s >= 3:
        q2_direct = alt_epstein(s, TernaryForm.Q2, "direct")
        details["residual_with_direct_q2"] = abs(lhs.value - (-6.0 * eta * eta - 4.0 * q2_direct.value))
    return IdentityReport.build(
        identity_id="crandall_relation",
        lhs=lhs.value,
        rhs=rhs,
        tolerance=tolerance,
        anchor="Relation between the Epstein sums of two ternary forms",
        details=details,
    )


# ---------------------------------------------------------------------------
# Fourier transform of 1/(1+e^{x^2}) and the double integral
# ---------------------------------------------------------------------------

def _logistic_gauss(x):
    """1/(1 + e^{x^2})."""
    return special.expit(-np.square(x))


def double_integral(L: float = 6.0) -> EvalResult:
    """
    Integral over R^2 of dy dz / ((1+e^{y^2})(1+e^{z^2})(1+e^{(y-z)^2})).

    The square [-L, L]^2 is integrated iteratively; the integrand is below
    e^{-y^2-z^2}/2, so the outside costs at most (pi/2)(1 - erf(L)^2).
    """
    if L <= 0:
        raise DomainError(f"half-width must be positive, got {L}")
    inner_spec = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-12)
    edges = np.linspace(-L, L, int(8 * L) + 1)
    inner_bound = [0.0]

    def inner(y: float) -> float:
        result = quadrature.integrate_pieces(lambda z: _logistic_gauss(z) * _logistic_gauss(y - z), edges, inner_spec)
        inner_bound[0] = max(inner_bound[0], result.error_bound)
        return float(_logistic_gauss(y)) * float(result.value)

    outer = quadrature.integrate(
        inner, -L, L, QuadratureSpec(abs_tol=1e-9, rel_tol=1e-10, breakpoints=[float(k) for k in range(-int(L), int(L) + 1)])
    )
    tail = 0.5 * math.pi * float(special.erfc(L)) * (1.0 + float(special.erf(L)))
    bound = outer.error_bound + L * inner_bound[0] + tail
    return EvalResult(value=outer.value, error_bound=bound, terms=outer.terms)


def double_integral_check(L: float = 6.0, tolerance: float = 1e-4) -> IdentityReport:
    """The double integral against -pi times the alternating q2 sum at s = 1/2."""
    integral = double_integral(L)
    q2 = alt_epstein(0.5, TernaryForm.Q2, "mellin")
    return IdentityReport.build(
        identity_id="double_integral",
        lhs=integral.value,
        rhs=-math.pi * q2.value,
        tolerance=tolerance,
        anchor="Double-integral representation of the q2 sum at s = 1/2",
        details={"L": L, "integral_bound": integral.error_bound, "q2_half": q2.value},
    )


def ghat_via_chi(t: float) -> float:
    """-(1/(2 sqrt(pi))) chi(1/2, t^2/4)."""
    u = t * t / 4.0
    if u == 0.0:
        chi = -eta_raw(0.5)[0]
    elif u < 0.25:
        chi = float(chi_pairs(0.5, u, _CHI_POLICY).value)
    else:
        chi = float(chi_half_accel(u).value)
    return -chi / (2.0 * math.sqrt(math.pi))


def ghat_check(t: float, tolerance: float = 1e-8) -> IdentityReport:
    """Fourier transform of 1/(1+e^{x^2}) by quadrature against chi(1/2, t^2/4)."""
    if abs(t) > 20:
        raise DomainError(f"ghat_check supports |t| <= 20, got {t}")
    omega = abs(t)
    hints = {"smoothness": "oscillatory", "frequency": omega} if omega > 0 else {}
    integral = quadrature.integrate(
        Integrand(
            func=lambda x: float(_logistic_gauss(x)) * math.cos(omega * x),
            decay=DecayHint(rate=1.0, power=2.0, constant=1.0),
            **hints,
        ),
        0.0,
        math.inf,
        QuadratureSpec(abs_tol=1e-12, rel_tol=1e-12),
    )
    return IdentityReport.build(
        identity_id="ghat",
        lhs=ghat_via_chi(t),
        rhs=integral.value / math.pi,
        tolerance=tolerance,
        anchor="Fourier transform of a Schwartz function through chi(1/2, t^2/4)",
        details={"t": t, "quadrature_bound": integral.error_bound / math.pi},
    )


# ---------------------------------------------------------------------------
# Bessel-series identities
# ---------------------------------------------------------------------------

def _segal_derivative(k: int, c: float, w: float) -> float:
    """k-th t-derivative of c^2 J_1(c sqrt t) / (4 c sqrt t) at w = c sqrt t."""
    return (-1) ** k * c ** (2 * k + 2) / 2.0 ** (k + 2) * float(special.jv(k + 1, w)) / w ** (k + 1)


def segal_series(z: float, tol: float = 1e-8) -> EvalResult:
    """
    pi z/2 - 1/2 + (1/4) sum_k (2 sqrt(2 k pi z)/k) J_1(2 sqrt(2 k pi z)).

    The summand is F(k) with F(t) = c^2 J_1(w)/(4w), c = 2 sqrt(2 pi z),
    w = c sqrt(t). Terms below K are summed; the rest is
    int_K^inf F = J_0(w_K)/2 plus F(K)/2 - F'(K)/12 + F'''(K)/720 with the
    remainder below (1/15120) c^12 2^-7 w_K^-5 / 5.
    """
    c = 2.0 * math.sqrt(2.0 * math.pi * z)
    scale = c ** 12 / 2.0 ** 7 * _EM6_CONSTANT / 5.0
    w_K = max(c, (scale / (tol / 10.0)) ** 0.2)
    K = max(1, math.ceil((w_K / c) ** 2))
    w_K = c * math.sqrt(K)

    if K > 1:
        k = np.arange(1, K, dtype=float)
        w = c * np.sqrt(k)
        head_terms = c * c * special.j1(w) / (4.0 * w)
        head = math.fsum(head_terms.tolist())
        head_abs = float(np.sum(np.abs(head_terms)))
    else:
        head, head_abs = 0.0, 0.0

    tail = (
        0.5 * float(special.j0(w_K))
        + 0.5 * _segal_derivative(0, c, w_K)
        - _segal_derivative(1, c, w_K) / 12.0
        + _segal_derivative(3, c, w_K) / 720.0
    )
    value = 0.5 * math.pi * z - 0.5 + head + tail
    bound = scale * w_K ** -5 + 8.0 * EPS * (head_abs + abs(tail) + 0.5 * math.pi * z + 0.5)
    return EvalResult(value=value, error_bound=bound, terms=K)


def segal_identity_check(z: float, tolerance: float = 1e-6) -> IdentityReport:
    """sum (1 - cos(z/k)) against its J_1 expansion."""
    if not 0.0 < z <= 10.0:
        raise DomainError(f"segal_identity_check supports 0 < z <= 10, got {z}")
    lhs = eval_sin2_sum(z / 2.0)
    rhs = segal_series(z, tol=tolerance / 10.0)
    return IdentityReport.build(
        identity_id="segal_j1",
        lhs=2.0 * float(lhs.value),
        rhs=rhs.value,
        tolerance=tolerance,
        anchor="Segal's J_1 expansion of sum (1 - cos(z/k))",
        details={"z": z, "bessel_terms": rhs.terms, "bound": 2.0 * lhs.error_bound + rhs.error_bound},
    )


def _principal_sqrt(w: complex) -> complex:
    if w.imag == 0.0 and w.real < 0.0:
        raise BranchError(f"square root argument {w} lies on the branch cut")
    return cmath.sqrt(w)


def hl_k0_series(z: ComplexLike, tol: float = 1e-10) -> EvalResult:
    """
    2 log z + 2 gamma - 2 sum_{n>=1} (K0(sqrt(2 n pi i z)) + K0(sqrt(-2 n pi i z))).

    With kappa = min Re sqrt(+-2 pi i z) and |K0(w)| <= 2 e^{-Re w} for |w| >= 1,
    the tail after N terms is below 16 e^{-kappa sqrt N}(sqrt(N)/kappa + 1/kappa^2).
    """
    z = complex(z.to_complex() if isinstance(z, ComplexValue) else z)
    if z.real < 0:
        raise DomainError(f"the K0 identity needs Re z > 0, got {z}")
    if z.real == 0:
        raise BranchError(f"Re z = 0 puts sqrt(+-2 pi i z) on the branch cut for z = {z}")

    roots = [_principal_sqrt(2.0 * math.pi * 1j * z), _principal_sqrt(-2.0 * math.pi * 1j * z)]
    kappa = min(r.real for r in roots)

    def tail(N: int) -> float:
        root = math.sqrt(N)
        return 16.0 * math.exp(-kappa * root) * (root / kappa + 1.0 / kappa ** 2)

    N = max(16, math.ceil((1.0 / min(abs(r) for r in roots)) ** 2))
    while tail(N) > tol:
        N *= 2
    n = np.sqrt(np.arange(1, N + 1, dtype=float))
    terms = special.kv(0, roots[0] * n) + special.kv(0, roots[1] * n)
    series = complex(math.fsum(terms.real.tolist()), math.fsum(terms.imag.tolist()))
    value = 2.0 * cmath.log(z) + 2.0 * EULER_GAMMA - 2.0 * series
    bound = tail(N) + 8.0 * EPS * (float(np.sum(np.abs(terms))) + abs(cmath.log(z)) + 1.0)
    return EvalResult(value=value, error_bound=bound, terms=N)


def hl_k0_identity_check(z: ComplexLike, tolerance: float = 1e-8) -> IdentityReport:
    """sum (1 - e^{-z/n})/n against its K0 expansion."""
    z = complex(z.to_complex() if isinstance(z, ComplexValue) else z)
    lhs = eval_ein_form(z)
    rhs = hl_k0_series(z, tol=tolerance / 10.0)
    return IdentityReport.build(
        identity_id="hl_k0",
        lhs=lhs.value,
        rhs=rhs.value,
        tolerance=tolerance,
        anchor="Hardy-Littlewood K0 expansion of sum (1 - e^{-z/n})/n",
        details={"z": [z.real, z.imag], "k0_terms": rhs.terms, "bound": lhs.error_bound + rhs.error_bound},
    )


def laplace_partial_fraction_check(p: float, tolerance: float = 1e-12) -> IdentityReport:
    """
    sum_{k>=1} 1/(p(p^2 k^2 + 1)) = pi/(2p^2) - 1/(2p) + (pi/p^2)/(e^{2 pi/p} - 1).

    The series is cut at N = max(1000, 1000/p) with the Euler-Maclaurin tail
    int_N^inf g + g(N)/2 - g'(N)/12. With x = pN > 1, g''' keeps its sign on
    [N, inf), so the remainder is at most 2 zeta(3)/(2 pi)^3 |g''(N)|. Both
    sides grow like pi/(2 p^2) as p -> 0, so the tolerance is relative
    above 1 and never below the certified bound.

    Raises:
        ConvergenceError: N would exceed settings.max_terms
    """
    if p <= 0:
        raise DomainError(f"p must be positive, got {p}")
    N = max(1000, math.ceil(1000.0 / p))
    if N > settings.max_terms:
        raise ConvergenceError(
            f"p = {p} needs {N} terms, above max_terms {settings.max_terms}",
            best_estimate=math.pi / (2.0 * p * p),
            achieved_bound=math.inf,
        )
    head, head_abs = partial_sum(lambda k: 1.0 / (p * (p * p * k * k + 1.0)), 1, N - 1)
    # g(k) = f(pk)/p with f(x) = 1/(1 + x^2)
    x = p * N
    w = x * x + 1.0
    g_N = 1.0 / (p * w)
    g1_N = -2.0 * x / (w * w)
    g2_N = p * (6.0 * x * x - 2.0) / w ** 3
    integral = math.atan2(1.0, x) / (p * p)
    lhs = head + integral + 0.5 * g_N - g1_N / 12.0
    remainder = 2.0 * float(special.zeta(3.0)) / (2.0 * math.pi) ** 3 * abs(g2_N)
    bound = remainder + 4.0 * EPS * (head_abs + integral)

    parts = (math.pi / (2.0 * p * p), -1.0 / (2.0 * p), (math.pi / (p * p)) / math.expm1(2.0 * math.pi / p))
    rhs = math.fsum(parts)
    bound += 4.0 * EPS * sum(abs(part) for part in parts)
    printed = rhs - 1.0 / (2.0 * p)
    return IdentityReport.build(
        identity_id="laplace_partial_fraction",
        lhs=lhs,
        rhs=rhs,
        tolerance=max(tolerance * max(1.0, abs(rhs)), bound),
        anchor="Partial fractions of z/(e^z - 1) at z = 2 pi/p",
        details={"p": p, "terms": N, "bound": bound, "printed_variant_diff": abs(lhs - printed)},
    )


# ---------------------------------------------------------------------------
# Mellin transforms of chi powers
# ---------------------------------------------------------------------------

def chi_squared_mellin_check(s: float, kind: str = "alternating", tolerance: float = 1e-7) -> IdentityReport:
    """
    Mellin transforms of squares of chi.

    alternating: (1/Gamma(s)) int t^{s-1} chi(s,t)^2 dt = eta(s) - eta(s-1)
    (Dirichlet eta); the variant with the Dirichlet beta function,
    beta(s-1) - beta(s), is recorded in the details.
    plain: (1/Gamma(s)) int t^{s-1} chi~(s,t)^2 dt = zeta(s-1) - zeta(s);
    chi~ decays like Gamma(s-1) t^{1-s}, so the integral is cut at T with
    tail C^2 T^{2-s}/(s-2), C = Gamma(s-1) + (s/e)^s.
    """
    if kind == "alternating":
        if s < 2:
            raise DomainError(f"the alternating chi^2 transform is checked for s >= 2, got {s}")

        def square(t: float) -> float:
            return float(_chi(s, t).value) ** 2 if t > 0 else eta_raw(s)[0] ** 2

        g = Integrand(func=square, decay=DecayHint(rate=2.0 * math.sqrt(2.0 * math.pi), power=0.5, constant=5.0))
        raw = quadrature.mellin_integral(g, s, QuadratureSpec(abs_tol=1e-11, rel_tol=1e-11))
        lhs = float(raw.value) / gamma_value(s)
        rhs = eta_raw(s)[0] - eta_raw(s - 1.0)[0]
        details = {"s": s, "kind": kind, "bound": raw.error_bound / gamma_value(s),
                   "printed_variant": _dirichlet_beta(s - 1.0) - _dirichlet_beta(s)}
    elif kind == "plain":
        if s < 4:
            raise DomainError(f"the chi~^2 transform is checked for s >= 4, got {s}")
        C = gamma_value(s - 1.0) + (s / math.e) ** s
        T = (C * C / ((s - 2.0) * tolerance / 10.0)) ** (1.0 / (s - 2.0))
        if T > 1e6:
            raise ConvergenceError(f"chi~^2 transform would need a cutoff of {T:.3g}")
        T = max(T, 10.0)
        policy = TruncationPolicy(tail_tolerance=1e-14)

        def square(t: float) -> float:
            return float(chi_tilde(s, t, policy).value) ** 2

        raw = quadrature.mellin_integral(square, s, QuadratureSpec(abs_tol=1e-11, rel_tol=1e-11), cutoff=T)
        tail = C * C * T ** (2.0 - s) / (s - 2.0)
        lhs = float(raw.value) / gamma_value(s)
        rhs = riemann_zeta(s - 1.0) - riemann_zeta(s)
        details = {"s": s, "kind": kind, "cutoff": T, "bound": (raw.error_bound + tail) / gamma_value(s)}
    else:
        raise DomainError(f"unknown kind {kind!r}")

    return IdentityReport.build(
        identity_id=f"chi_squared_mellin.{kind}",
        lhs=lhs,
        rhs=rhs,
        tolerance=tolerance,
        anchor="Mellin transform of the square of chi",
        details=details,
    )


def _dirichlet_beta(s: float) -> float:
    if s == 1.0:
        return math.pi / 4.0
    return 4.0 ** (-s) * (hurwitz_zeta_raw(s, 0.25)[0] - hurwitz_zeta_raw(s, 0.75)[0])


def chi_tilde_cubed_mellin_check(s: float, tolerance: float = 1e-6) -> IdentityReport:
    """
    (1/Gamma(s)) int t^{s-1} chi~(s,t)^3 dt = sum_{p,q,r>=1} (pq+qr+rp)^{-s}.

    The integral is cut at T with tail C^3 T^{3-2s}/(2s-3); the triple sum
    is enumerated.
    """
    if s < 3:
        raise DomainError(f"the chi~^3 transform is checked for s >= 3, got {s}")
    C = gamma_value(s - 1.0) + (s / math.e) ** s
    T = max(10.0, (C ** 3 / ((2.0 * s - 3.0) * tolerance / 10.0)) ** (1.0 / (2.0 * s - 3.0)))
    policy = TruncationPolicy(tail_tolerance=1e-14)
    raw = quadrature.mellin_integral(
        lambda t: float(chi_tilde(s, t, policy).value) ** 3, s, QuadratureSpec(abs_tol=1e-11, rel_tol=1e-11), cutoff=T
    )
    tail = C ** 3 * T ** (3.0 - 2.0 * s) / (2.0 * s - 3.0)
    direct = q2_triple_sum(s, 50_000, alternating=False)
    return IdentityReport.build(
        identity_id="chi_tilde_cubed_mellin",
        lhs=float(raw.value) / gamma_value(s),
        rhs=direct.value,
        tolerance=tolerance,
        anchor="Mellin transform of the cube of chi~",
        details={"s": s, "cutoff": T, "mellin_bound": (raw.error_bound + tail) / gamma_value(s),
                 "direct_bound": direct.error_bound},
    )


def lcm_growth_check(n: int, tolerance: float = 1e-9) -> IdentityReport:
    """log lcm(1..n) = psi(n), with lcm(1..n) <= 3^n recorded."""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    lcm = sieve.lcm_upto(n)
    psi = float(sieve.chebyshev_psi(n)[n])
    return IdentityReport.build(
        identity_id="lcm_growth",
        lhs=math.log(lcm),
        rhs=psi,
        tolerance=tolerance * max(1.0, psi),
        anchor="lcm(1..n) = exp(psi(n))",
        details={"n": n, "below_3_to_n": lcm <= 3 ** n, "psi_over_n": psi / n},
    )


def g_nu_check(nu: float, z: ComplexLike, tolerance: float = 1e-9) -> IdentityReport:
    """Zeta-coefficient series G_nu against its direct sum over m."""
    series = g_nu_series(nu, z)
    direct = g_nu_direct(nu, z)
    return IdentityReport.build(
        identity_id="g_nu",
        lhs=series.value,
        rhs=direct.value,
        tolerance=tolerance,
        anchor="G_nu as a zeta-coefficient power series",
        details={"nu": nu, "series_bound": series.error_bound, "direct_bound": direct.error_bound},
    )
