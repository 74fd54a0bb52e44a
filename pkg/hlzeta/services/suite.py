"""
Identity suite: the registry of every identity check and the runner behind
the verify command and the /verify endpoint.

Identity ids are dotted, parameters included (``kubert.m2.x0.3``). The
registry order is the canonical order; reports come back in that order
whatever the completion order of the workers.
"""
import time
from concurrent.futures import Future, ThreadPoolExecutor
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

from hlzeta.core.exceptions import UnknownIdentityError
from hlzeta.models.schemas import IdentityInfo, IdentityReport, SuiteConfig, SuiteRun
from hlzeta.services import franel, hlseries, lattice, sawtooth, summation
from hlzeta.services.specfun import sieve
from hlzeta.utils.helpers import select_identities
from hlzeta.utils.logger import logger

Runner = Callable[[Optional[float]], IdentityReport]


class IdentityCheck(BaseModel):
    """One registered identity: its id, citation, default tolerance and runner."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    identity_id: str
    anchor: str
    tolerance: Optional[float] = Field(None, description="None: the check certifies its own bound")
    runner: Runner
    slow: bool = False

    def info(self) -> IdentityInfo:
        return IdentityInfo(
            identity_id=self.identity_id, anchor=self.anchor, tolerance=self.tolerance, slow=self.slow
        )


def _label(value: Union[int, float, complex]) -> str:
    """Compact id fragment for a parameter value."""
    if isinstance(value, complex):
        return f"{value.real:g}{value.imag:+g}i"
    return f"{value:g}"


def _with_tolerance(report: IdentityReport, tolerance: Optional[float]) -> IdentityReport:
    if tolerance is None:
        return report
    return IdentityReport.build(
        identity_id=report.identity_id,
        lhs=report.lhs,
        rhs=report.rhs,
        tolerance=tolerance,
        anchor=report.anchor,
        details=report.details,
    )


def _fixed(check: Callable[[], IdentityReport]) -> Runner:
    """Runner for checks without a tolerance argument; overrides re-judge the report."""
    return lambda tol: _with_tolerance(check(), tol)


def _build_registry() -> List[IdentityCheck]:
    checks: List[IdentityCheck] = []

    def add(identity_id: str, anchor: str, tolerance: Optional[float], runner: Runner, slow: bool = False) -> None:
        checks.append(IdentityCheck(
            identity_id=identity_id, anchor=anchor, tolerance=tolerance, runner=runner, slow=slow
        ))

    # sawtooth
    for m in (1, 2, 3, 7):
        for x in (0.3, 2.0, -1.45):
            add(f"kubert.m{m}.x{_label(x)}", "Kubert identity for the sawtooth", 1e-13,
                lambda tol, m=m, x=x: sawtooth.kubert_check(m, x, tol))
    for x in (1, 2, 60, 1000.5, 100_000):
        add(f"divisor_sum.x{_label(x)}", "divisor and fractional-part sums", 1e-9,
            lambda tol, x=x: sawtooth.divisor_sum_identity(float(x), tol))
    for theta in (0.25, 0.5, 1.0):
        for s in (1.5, 2.0, 3.0):
            add(f"beurling.theta{_label(theta)}.s{_label(s)}", "Mellin transform of the dilated sawtooth", 1e-8,
                lambda tol, theta=theta, s=s: sawtooth.beurling_mellin_check(theta, s, tol))
    for theta in (0.5, 1.0):
        for s in (0.25, 0.5, 0.75):
            add(f"classical_mellin.theta{_label(theta)}.s{_label(s)}", "Nyman-Beurling integral", 1e-8,
                lambda tol, theta=theta, s=s: sawtooth.classical_integral_check(theta, s, tol))
    for s, a in ((0.5, 1.0), (2.0, 0.5), (3.5, 2.5)):
        add(f"hurwitz_integral.s{_label(s)}.a{_label(a)}", "sawtooth representation of the Hurwitz zeta function",
            1e-10, lambda tol, s=s, a=a: sawtooth.hurwitz_integral_check(s, a, tol))
    for theta, name in ((1.0, "linear"), (0.5, "sine"), (0.7, "zero")):
        add(f"rho_decomposition.{name}.theta{_label(theta)}", "decomposition formula for the dilated sawtooth", 1e-7,
            lambda tol, theta=theta, name=name: sawtooth.rho_decomposition_check(theta, name, tol))
    for theta in (0.3, 0.5, 0.9):
        for n in range(1, 21):
            add(f"fourier_an.theta{_label(theta)}.n{n}", "Fourier coefficients of the dilated sawtooth", 1e-8,
                lambda tol, theta=theta, n=n: sawtooth.fourier_an_check(theta, n, tol))

    # hlseries
    for x in (1e3, 1e4, 1e5, 1e6):
        add(f"sin2_limit.x{_label(x)}", "limit of sum sin^2(x/n)/x", None,
            _fixed(lambda x=x: hlseries.sin2_limit_check(x)))
    power_points: List[Tuple[str, Union[float, complex]]] = (
        [("sin_form", x) for x in (-0.9, -0.5, 0.1, 0.5, 0.9)]
        + [("onemcos_form", x) for x in (-0.9, -0.5, 0.1, 0.5, 0.9)]
        + [("exp_form", z) for z in (0.9, 0.5, 0.1, 0.5 + 0.5j, 0.3 - 0.8j,
                                     0.1 + 0.2j, 0.6j, 0.7 - 0.3j, 0.05 + 0.85j, 0.4 + 0.1j)]
    )
    for form, z in power_points:
        add(f"power_series.{form}.z{_label(z)}", "zeta power series of the Hardy-Littlewood sums", 1e-10,
            lambda tol, form=form, z=z: hlseries.power_series_check(form, z, tol))
    for n, K in ((1, 1000), (2, 10_000), (6, 10_000)):
        add(f"g_mean.n{n}.K{K}", "mean value of G on the imaginary axis", None,
            lambda tol, n=n, K=K: hlseries.g_mean_check(n, K, tol))
    for x, test_fn, label in ((100.0, "sin", "sin"), (1000.0, "sin", "sin"), (1000.0, "char:4:1", "char4_1"),
                              (100.0, "constant", "constant")):
        add(f"delange.{label}.x{_label(x)}", "Delange identity", 1e-9,
            lambda tol, x=x, test_fn=test_fn: hlseries.delange_check(x, test_fn, tol))
    for s, t in ((0.5, 1.0), (2.0, 0.5)):
        add(f"chi_split.s{_label(s)}.t{_label(t)}", "even/odd split of chi", None,
            _fixed(lambda s=s, t=t: hlseries.chi_split_check(s, t)))

    # franel
    add("franel2.table", "table of second-kind Franel integrals", None, _fixed(franel.franel2_table_check))
    for n in range(1, 7):
        for m in range(1, 7):
            add(f"franel2.n{n}.m{m}", "second-kind Franel integral", 1e-8,
                lambda tol, n=n, m=m: franel.franel2_check(n, m, tol), slow=True)
    add("mordell.disambiguation", "Franel formula", None, _fixed(franel.mordell_disambiguation))
    for r, a, b in ((1, 1, 1), (1, 1, 2), (1, 2, 3), (2, 2, 3), (3, 3, 4)):
        add(f"mordell.r{r}.a{a}.b{b}", "Mordell product formula", 1e-10,
            lambda tol, r=r, a=a, b=b: franel.classical_product_check(r, a, b, tol))
    for s, a, b in ((0.75, 1, 1), (2.0, 2, 4), (1.5, 2, 3)):
        add(f"hurwitz_product.s{_label(s)}.a{a}.b{b}", "Hurwitz zeta product integral", 1e-6,
            lambda tol, s=s, a=a, b=b: franel.hurwitz_product_check(s, a, b, tol))
    for k in range(11):
        beta = k / 10
        add(f"franel1.beta{_label(beta)}", "first-kind Franel integral", 1e-8,
            lambda tol, beta=beta: franel.franel_first_kind_check(beta, tol), slow=True)

    # summation
    for name, f in summation.STANDARD_TEST_FUNCTIONS.items():
        add(f"poisson.{name}", "Poisson summation for even functions", 1e-9,
            lambda tol, f=f: summation.poisson_even_check(f, tol))
    for name, f in summation.STANDARD_TEST_FUNCTIONS.items():
        add(f"voronoi.{name}", "Voronoi summation formula", 1e-6,
            lambda tol, f=f: summation.voronoi_check(f, tol), slow=True)
    for a in (0.5, 1.0, 1.7, 3.0):
        add(f"koshliakov.a{_label(a)}", "Koshliakov formula", 1e-10,
            lambda tol, a=a: summation.koshliakov_check(a, tol))
    for kind, grid in (("K0", (0.25, 0.5, 0.75)), ("Y0", (0.25, 0.5, 0.75)), ("J0", (0.25, 0.5))):
        for s in grid:
            add(f"voronoi_mellin.{kind}.s{_label(s)}", "Mellin transforms of the Voronoi kernels", 1e-7,
                lambda tol, kind=kind, s=s: summation.voronoi_mellin_check(s, kind, tol))

    # lattice
    for q in (0.1, 0.3, 0.5, 0.7):
        add(f"theta4_cubed.q{_label(q)}", "Andrews' lemma for theta_4^3", 1e-12,
            lambda tol, q=q: lattice.theta4_cubed_check(q, tol))
    add("theta4_cubed.coefficients", "Andrews' lemma, coefficients (-1)^n r_3(n)", None,
        _fixed(lattice.theta_coefficients_check))
    for t in (1.0, 4.0, 9.0, 16.0):
        add(f"chi_half.t{_label(t)}", "functional equation of chi(1/2, t)", 1e-10,
            lambda tol, t=t: lattice.chi_half_check(t, tol))
    for form in ("q1", "q2"):
        add(f"alt_epstein.{form}.s3", "alternating Epstein sums, Mellin against direct", 1e-6,
            lambda tol, form=form: lattice.alt_epstein_check(3.0, form, tol), slow=True)
    for s, tolerance in ((2.0, 1e-5), (3.0, 1e-6)):
        add(f"crandall.s{_label(s)}", "ternary relation between q1, q2 and eta", tolerance,
            lambda tol, s=s: lattice.crandall_relation_check(s, tol), slow=True)
    add("double_integral", "double integral for q2(1/2)", 1e-4,
        lambda tol: lattice.double_integral_check(tolerance=tol), slow=True)
    for t in (0.0, 4.0, -7.5):
        add(f"ghat.t{_label(t)}", "Fourier transform of 1/(1+e^{x^2}) through chi", 1e-8,
            lambda tol, t=t: lattice.ghat_check(t, tol))
    for z, tolerance in ((1e-3, 1e-5), (0.5, 1e-6), (1.0, 1e-6), (5.0, 1e-6)):
        add(f"segal.z{_label(z)}", "Segal's J_1 series", tolerance,
            lambda tol, z=z: lattice.segal_identity_check(z, tol))
    for z in (1.0 + 0j, 2.0 + 1.0j, 0.5 + 2.0j):
        add(f"hl_k0.z{_label(z)}", "Hardy-Littlewood K_0 relation", 1e-8,
            lambda tol, z=z: lattice.hl_k0_identity_check(z, tol))
    for p in (0.01, 0.5, 1.0, 10.0, 1000.0):
        add(f"laplace.p{_label(p)}", "partial fractions of the hyperbolic cotangent", 1e-12,
            lambda tol, p=p: lattice.laplace_partial_fraction_check(p, tol))
    for kind, grid in (("alternating", (2.0, 3.0)), ("plain", (5.0, 6.0))):
        for s in grid:
            add(f"chi_squared_mellin.{kind}.s{_label(s)}", "Mellin transform of chi squared", 1e-7,
                lambda tol, kind=kind, s=s: lattice.chi_squared_mellin_check(s, kind, tol))
    add("chi_tilde_cubed_mellin.s3", "Mellin transform of chi~ cubed", 1e-6,
        lambda tol: lattice.chi_tilde_cubed_mellin_check(3.0, tol), slow=True)
    for n in (10, 100, 1000):
        add(f"lcm_growth.n{n}", "lcm(1..n) and the Chebyshev function", 1e-9,
            lambda tol, n=n: lattice.lcm_growth_check(n, tol))
    for nu, z in ((0.0, 0.5), (-1.0, 0.5), (1.5, 0.3 + 0.4j)):
        add(f"g_nu.nu{_label(nu)}.z{_label(z)}", "zeta series G_nu", 1e-9,
            lambda tol, nu=nu, z=z: lattice.g_nu_check(nu, z, tol))

    return checks


class IdentitySuite:
    """Selects and runs registered identity checks."""

    def __init__(self, checks: Optional[Sequence[IdentityCheck]] = None):
        """Initialize the suite with the built-in registry unless checks are given."""
        self._checks: List[IdentityCheck] = list(checks) if checks is not None else _build_registry()
        self._by_id: Dict[str, IdentityCheck] = {c.identity_id: c for c in self._checks}
        if len(self._by_id) != len(self._checks):
            raise ValueError("duplicate identity ids in the registry")

    def list_identities(self) -> List[IdentityInfo]:
        return [check.info() for check in self._checks]

    def get(self, identity_id: str) -> IdentityCheck:
        try:
            return self._by_id[identity_id]
        except KeyError:
            raise UnknownIdentityError(f"unknown identity {identity_id!r}", selector=identity_id)

    def select(self, selectors: Sequence[str]) -> List[IdentityCheck]:
        """
        Resolve selectors to checks in canonical order.

        Raises:
            UnknownIdentityError: If a selector matches nothing
        """
        ids = select_identities(selectors, [c.identity_id for c in self._checks])
        return [self._by_id[i] for i in ids]

    def _execute(self, check: IdentityCheck, tolerance: Optional[float]) -> IdentityReport:
        started = time.time()
        report = check.runner(tolerance)
        report = report.model_copy(update={"identity_id": check.identity_id, "anchor": check.anchor})
        logger.info(
            "identity checked",
            identity_id=check.identity_id,
            passed=report.passed,
            abs_diff=report.abs_diff,
            tolerance=report.tolerance,
            seconds=round(time.time() - started, 3),
        )
        return report

    def iter_run(
        self, selectors: Sequence[str], config: Optional[SuiteConfig] = None
    ) -> Iterator[Tuple[IdentityCheck, Union[IdentityReport, Exception]]]:
        """
        Run the selected checks and yield (check, report or error) in canonical order.

        Each check runs in isolation: an exception is yielded in place of its
        report and the remaining checks keep running.
        """
        config = config or SuiteConfig()
        checks = self.select(selectors)
        if config.sieve_bound != sieve.bound:
            sieve.resize(config.sieve_bound)
        logger.info("suite started", identities=len(checks), jobs=config.jobs)

        def tolerance_for(check: IdentityCheck) -> Optional[float]:
            return config.tolerance_overrides.get(check.identity_id, check.tolerance)

        with ThreadPoolExecutor(max_workers=config.jobs) as executor:
            futures: List[Future] = [
                executor.submit(self._execute, check, tolerance_for(check)) for check in checks
            ]
            for check, future in zip(checks, futures):
                try:
                    yield check, future.result()
                except Exception as e:
                    logger.error(
                        "identity check raised",
                        identity_id=check.identity_id,
                        error_type=type(e).__name__,
                        error=str(e),
                    )
                    yield check, e

    def run(self, selectors: Sequence[str], config: Optional[SuiteConfig] = None) -> SuiteRun:
        """Run the selected checks and collect the outcome."""
        result = SuiteRun()
        for check, outcome in self.iter_run(selectors, config):
            if isinstance(outcome, Exception):
                result.errors[check.identity_id] = f"{type(outcome).__name__}: {outcome}"
            else:
                result.reports.append(outcome)
        logger.info(
            "suite finished",
            total=result.total,
            passed=result.passed,
            failed=result.failed,
            errors=len(result.errors),
        )
        return result


# Global identity suite instance
identity_suite = IdentitySuite()
