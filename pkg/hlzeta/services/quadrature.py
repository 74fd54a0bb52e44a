"""
Numerical integration with mandatory breakpoints and explicit tail handling.

Adaptive work is delegated to QUADPACK through scipy.integrate.quad; many
short smooth pieces are handled by a vectorised Gauss-Legendre pair whose
difference serves as the per-piece error estimate.
"""
import math
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate as sp_integrate
from scipy import special

from hlzeta.core.exceptions import ConvergenceError, DomainError
from hlzeta.models.schemas import DecayHint, EvalResult, Integrand, QuadratureSpec
from hlzeta.utils.logger import logger

EPS = float(np.finfo(float).eps)

# Pieces evaluated per vectorised block
_BLOCK = 20_000


def _coerce(f: Union[Integrand, Callable]) -> Integrand:
    return f if isinstance(f, Integrand) else Integrand(func=f)


def _quad_real(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    abs_tol: float,
    rel_tol: float,
    limit: int,
    **kwargs,
) -> Tuple[float, float, bool]:
    """One QUADPACK call; returns (value, error estimate, converged)."""
    res = sp_integrate.quad(
        func, lo, hi, epsabs=abs_tol, epsrel=rel_tol, limit=limit, full_output=1, **kwargs
    )
    value, err = float(res[0]), float(res[1])
    converged = len(res) == 3
    return value, err, converged


def _quad_piece(
    integrand: Integrand, lo: float, hi: float, abs_tol: float, rel_tol: float, limit: int
) -> Tuple[complex, float, bool]:
    if integrand.complex_valued:
        re, re_err, re_ok = _quad_real(
            lambda t: complex(integrand.func(t)).real, lo, hi, abs_tol / 2, rel_tol, limit
        )
        im, im_err, im_ok = _quad_real(
            lambda t: complex(integrand.func(t)).imag, lo, hi, abs_tol / 2, rel_tol, limit
        )
        return complex(re, im), re_err + im_err, re_ok and im_ok
    value, err, ok = _quad_real(lambda t: float(integrand.func(t)), lo, hi, abs_tol, rel_tol, limit)
    return value, err, ok


def decay_tail(hint: DecayHint, T: float, weight_power: float = 0.0) -> float:
    """
    Bound of int_T^inf t^w C e^{-r t^p} dt = (C/p) r^{-(w+1)/p} Gamma((w+1)/p, r T^p).
    """
    a = (weight_power + 1.0) / hint.power
    if a <= 0:
        raise DomainError("decay tail needs weight_power > -1")
    x = hint.rate * T ** hint.power
    upper = special.gammaincc(a, x) * special.gamma(a)
    return hint.constant / hint.power * hint.rate ** (-a) * upper


def truncation_point(hint: DecayHint, target: float, start: float, weight_power: float = 0.0) -> float:
    """Smallest doubling point T >= start with tail bound below target."""
    T = max(start, 1.0)
    for _ in range(200):
        if decay_tail(hint, T, weight_power) < target:
            return T
        T *= 1.25
    raise ConvergenceError(f"decay hint {hint} never brings the tail below {target:g}")


def _edges(a: float, b: float, breakpoints: Sequence[float], frequency: Optional[float]) -> List[float]:
    inner = [p for p in breakpoints if a < p < b]
    if frequency:
        period = math.pi / frequency
        k_lo = math.floor(a / period) + 1
        k_hi = math.ceil(b / period) - 1
        inner.extend(k * period for k in range(k_lo, k_hi + 1))
    edges = sorted(set([a, b] + inner))
    return edges


def integrate(
    f: Union[Integrand, Callable],
    a: float,
    b: float,
    spec: Optional[QuadratureSpec] = None,
    weight_power: float = 0.0,
) -> EvalResult:
    """
    Integrate f over [a, b] with b possibly +inf.

    Args:
        f: Integrand (a plain callable is treated as smooth and real)
        a: Lower limit
        b: Upper limit or math.inf (requires a decay hint)
        spec: Tolerances and mandatory breakpoints
        weight_power: Exponent w of an extra factor t^w, used only for the
            analytic tail bound beyond the truncation point

    Returns:
        Value and error bound (sum of piece estimates plus tail bound)
    """
    integrand = _coerce(f)
    spec = spec or QuadratureSpec()
    if not a < b:
        raise DomainError(f"integration needs a < b, got [{a}, {b}]")

    tail_bound = 0.0
    if math.isinf(b):
        if integrand.decay is None:
            raise DomainError("semi-infinite integration needs a decay hint")
        b = truncation_point(integrand.decay, spec.abs_tol / 4, max(a, 1.0), weight_power)
        tail_bound = decay_tail(integrand.decay, b, weight_power)
        logger.debug("semi-infinite truncation", T=b, tail=tail_bound)

    frequency = integrand.frequency if integrand.smoothness == "oscillatory" else None
    edges = _edges(a, b, spec.breakpoints, frequency)
    pieces = len(edges) - 1
    piece_tol = spec.abs_tol / (2 * pieces)

    values = []
    errors = []
    failed = 0
    for lo, hi in zip(edges, edges[1:]):
        value, err, ok = _quad_piece(integrand, lo, hi, piece_tol, spec.rel_tol, spec.max_subdivisions)
        values.append(value)
        errors.append(err)
        failed += 0 if ok else 1

    if integrand.complex_valued:
        total = complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))
    else:
        total = math.fsum(values)
    bound = math.fsum(errors) + tail_bound + 4.0 * EPS * sum(abs(v) for v in values)

    target = max(spec.abs_tol, spec.rel_tol * abs(total))
    if failed or bound > target:
        logger.error("quadrature failed", a=a, b=b, pieces=pieces, bound=bound, target=target)
        raise ConvergenceError(
            f"quadrature on [{a:g}, {b:g}] reached {bound:.3g} > {target:.3g}",
            best_estimate=total,
            achieved_bound=bound,
        )
    return EvalResult(value=total, error_bound=bound, terms=pieces)


@lru_cache(maxsize=8)
def _gauss_legendre(n: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def integrate_pieces(
    f: Callable[[np.ndarray], np.ndarray],
    edges: np.ndarray,
    spec: Optional[QuadratureSpec] = None,
    order: int = 16,
) -> EvalResult:
    """
    Sum of integrals of a vectorised smooth f over consecutive pieces.

    Each piece gets an order and a 2*order Gauss-Legendre rule; their
    difference is the piece error. Pieces whose difference exceeds their
    share of the tolerance are re-integrated adaptively.

    Args:
        f: Vectorised integrand (accepts 2-D arrays)
        edges: Strictly increasing piece boundaries
        spec: Tolerances
        order: Lower Gauss order

    Returns:
        Sum over all pieces
    """
    spec = spec or QuadratureSpec()
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise DomainError("piece edges must be strictly increasing")

    n_pieces = edges.size - 1
    piece_tol = spec.abs_tol / (2 * n_pieces)
    x_lo, w_lo = _gauss_legendre(order)
    x_hi, w_hi = _gauss_legendre(2 * order)

    total_parts = []
    bound = 0.0
    abs_mass = 0.0
    refined = 0
    for start in range(0, n_pieces, _BLOCK):
        lo = edges[start : start + _BLOCK]
        hi = edges[start + 1 : start + _BLOCK + 1]
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        coarse = half * (f(mid[:, None] + half[:, None] * x_lo[None, :]) @ w_lo)
        fine = half * (f(mid[:, None] + half[:, None] * x_hi[None, :]) @ w_hi)
        err = np.abs(fine - coarse)

        bad = np.nonzero(err > piece_tol)[0]
        for i in bad:
            value, e, ok = _quad_real(
                lambda t: float(np.real(f(np.asarray([t]))[0])),
                float(lo[i]), float(hi[i]), piece_tol, spec.rel_tol, spec.max_subdivisions,
            )
            if not ok:
                raise ConvergenceError(
                    f"piece [{lo[i]:g}, {hi[i]:g}] did not converge",
                    best_estimate=float(np.sum(fine)),
                    achieved_bound=float(e),
                )
            fine[i] = value
            err[i] = e
        refined += bad.size

        total_parts.append(fine)
        bound += float(np.sum(err))
        abs_mass += float(np.sum(np.abs(fine)))

    values = np.concatenate(total_parts)
    total = math.fsum(values.tolist())
    bound += 4.0 * EPS * abs_mass
    logger.debug("piecewise Gauss-Legendre", pieces=n_pieces, refined=refined, bound=bound)

    target = max(spec.abs_tol, spec.rel_tol * abs(total))
    if bound > target:
        raise ConvergenceError(
            f"piecewise quadrature reached {bound:.3g} > {target:.3g}",
            best_estimate=total,
            achieved_bound=bound,
        )
    return EvalResult(value=total, error_bound=bound, terms=n_pieces)


def mellin_integral(
    g: Union[Integrand, Callable],
    s: float,
    spec: Optional[QuadratureSpec] = None,
    cutoff: Optional[float] = None,
) -> EvalResult:
    """
    int_0^inf t^{s-1} g(t) dt, split at t = 1.

    On (0, 1] the factor t^{s-1} is handled by the algebraic-weight rule
    (QAWS); for s < 1 the substitution t = u^{1/s} is used if that rule does
    not converge. On [1, inf) the decay hint of g fixes the truncation point;
    with an explicit cutoff the integral stops there and the caller owns the
    tail beyond it (algebraically decaying g).

    Args:
        g: Integrand bounded near 0, decaying per its hint at infinity
        s: Real exponent > 0
        spec: Tolerances
        cutoff: Finite upper limit replacing the decay-hint truncation

    Returns:
        Value with the combined bound (tail beyond cutoff excluded)
    """
    integrand = _coerce(g)
    spec = spec or QuadratureSpec()
    if s <= 0:
        raise DomainError(f"Mellin integral needs s > 0, got {s}")
    if integrand.decay is None and cutoff is None:
        raise DomainError("Mellin integral needs a decay hint for g or an explicit cutoff")
    if cutoff is not None and cutoff <= 1.0:
        raise DomainError(f"Mellin cutoff must exceed 1, got {cutoff}")

    half = spec.model_copy(update={"abs_tol": spec.abs_tol / 2, "breakpoints": []})

    # (0, 1]
    parts = [lambda t: complex(integrand.func(t)).real]
    if integrand.complex_valued:
        parts.append(lambda t: complex(integrand.func(t)).imag)
    near = []
    near_err = 0.0
    for part in parts:
        value, err, ok = _quad_real(
            part, 0.0, 1.0, half.abs_tol / len(parts), half.rel_tol, half.max_subdivisions,
            weight="alg", wvar=(s - 1.0, 0.0),
        )
        if not ok and s < 1.0:
            logger.debug("weighted rule failed, substituting t = u^(1/s)", s=s)
            value, err, ok = _quad_real(
                lambda u, part=part: part(u ** (1.0 / s)) / s,
                0.0, 1.0, half.abs_tol / len(parts), half.rel_tol, half.max_subdivisions,
            )
        if not ok:
            raise ConvergenceError(
                f"Mellin integral on (0, 1] failed at s={s}", best_estimate=value, achieved_bound=err
            )
        near.append(value)
        near_err += err
    near_value = complex(near[0], near[1]) if integrand.complex_valued else near[0]

    # [1, inf)
    far_integrand = Integrand(
        func=lambda t: t ** (s - 1.0) * integrand.func(t),
        decay=integrand.decay,
        complex_valued=integrand.complex_valued,
        smoothness=integrand.smoothness,
        frequency=integrand.frequency,
    )
    if cutoff is None:
        far = integrate(far_integrand, 1.0, math.inf, half, weight_power=s - 1.0)
    else:
        decades = [10.0 ** k for k in range(1, int(math.log10(cutoff)) + 1) if 10.0 ** k < cutoff]
        far = integrate(far_integrand, 1.0, cutoff, half.with_breakpoints(decades))

    total = near_value + far.value
    bound = near_err + far.error_bound
    return EvalResult(value=total, error_bound=bound, terms=far.terms)
