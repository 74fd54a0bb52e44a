"""
Pydantic models shared by the numerical services, the suite and the API.
"""
import math
from enum import Enum
from typing import Any, Callable, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from hlzeta.core.config import settings

Scalar = Union[float, complex]


def _finite(value: Scalar) -> bool:
    if isinstance(value, complex):
        return math.isfinite(value.real) and math.isfinite(value.imag)
    return math.isfinite(value)


def _normalize_scalar(v: Any) -> Any:
    """Collapse numpy scalars and purely real complex values to plain floats."""
    if isinstance(v, (int, float)):
        return v
    if hasattr(v, "imag"):
        c = complex(v)
        return c if c.imag != 0.0 else c.real
    return v


# ---------------------------------------------------------------------------
# Enumerations
# ---------------------------------------------------------------------------

class ArithKind(str, Enum):
    MOBIUS = "mobius"
    MANGOLDT = "mangoldt"
    LIOUVILLE = "liouville"
    OMEGA_DISTINCT = "omega_distinct"
    DIVISOR_COUNT = "divisor_count"
    SIGMA_S = "sigma_s"
    R3 = "r3"
    CHEBYSHEV_PSI = "chebyshev_psi"
    LCM_UPTO = "lcm_upto"


class SeriesKind(str, Enum):
    F_HL = "f_hl"
    F_COS = "F_cos"
    SIN2_SUM = "sin2_sum"
    G_TENENBAUM = "G_tenenbaum"
    CHI = "chi"
    CHI_TILDE = "chi_tilde"
    G_NU = "G_nu"


class PowerSeriesForm(str, Enum):
    SIN_FORM = "sin_form"
    ONEMCOS_FORM = "onemcos_form"
    EXP_FORM = "exp_form"


class SawtoothConvention(str, Enum):
    FRACTIONAL = "fractional"
    CENTERED = "centered"


class TernaryForm(str, Enum):
    Q1 = "q1"  # u^2 + v^2 + w^2
    Q2 = "q2"  # uv + vw + wu


# ---------------------------------------------------------------------------
# Numeric plumbing
# ---------------------------------------------------------------------------

class ComplexValue(BaseModel):
    """A complex number with finite components."""

    re: float = Field(..., description="Real part")
    im: float = Field(0.0, description="Imaginary part")

    @model_validator(mode="after")
    def check_finite(self) -> "ComplexValue":
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ValueError("complex components must be finite")
        return self

    @classmethod
    def of(cls, z: Scalar) -> "ComplexValue":
        z = complex(z)
        return cls(re=z.real, im=z.imag)

    def to_complex(self) -> complex:
        return complex(self.re, self.im)


class EvalResult(BaseModel):
    """A value paired with a certified absolute error bound."""

    model_config = ConfigDict(frozen=True)

    value: Scalar = Field(..., description="Real or complex value")
    error_bound: float = Field(..., ge=0.0, description="Certified absolute error bound")
    terms: Optional[int] = Field(None, description="Number of terms or pieces used")

    @field_validator("value", mode="before")
    @classmethod
    def normalize_value(cls, v: Any) -> Any:
        return _normalize_scalar(v)

    @model_validator(mode="after")
    def check_finite(self) -> "EvalResult":
        if not _finite(self.value) or not math.isfinite(self.error_bound):
            raise ValueError("EvalResult must be finite")
        return self

    @property
    def real(self) -> float:
        return complex(self.value).real


class TruncationPolicy(BaseModel):
    """Work limit and tail tolerance for every infinite series."""

    max_terms: int = Field(default_factory=lambda: settings.max_terms, ge=1)
    tail_tolerance: float = Field(default_factory=lambda: settings.tail_tolerance, gt=0.0)
    tail_mode: Literal["euler_maclaurin", "bound"] = Field(
        default_factory=lambda: settings.tail_mode,
        description="euler_maclaurin adds the integral tail; bound truncates plainly",
    )


class QuadratureSpec(BaseModel):
    """Tolerances, subdivision limit and mandatory breakpoints."""

    abs_tol: float = Field(default_factory=lambda: settings.quad_abs_tol, gt=0.0)
    rel_tol: float = Field(default_factory=lambda: settings.quad_rel_tol, gt=0.0)
    max_subdivisions: int = Field(default_factory=lambda: settings.quad_max_subdivisions, ge=1)
    breakpoints: List[float] = Field(default_factory=list)

    @field_validator("breakpoints")
    @classmethod
    def check_increasing(cls, v: List[float]) -> List[float]:
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        return v

    def with_breakpoints(self, points: List[float]) -> "QuadratureSpec":
        return self.model_copy(update={"breakpoints": sorted(set(points))})


class DecayHint(BaseModel):
    """Envelope |f(t)| <= constant * exp(-rate * t**power) for t >= 1."""

    rate: float = Field(..., gt=0.0)
    constant: float = Field(1.0, gt=0.0)
    power: float = Field(1.0, gt=0.0)


class Integrand(BaseModel):
    """A deterministic callable plus the hints the integrator relies on."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    func: Callable[[float], Scalar]
    smoothness: Literal["smooth", "piecewise", "oscillatory"] = "smooth"
    decay: Optional[DecayHint] = None
    frequency: Optional[float] = Field(None, gt=0.0, description="Angular frequency of an oscillatory factor")
    complex_valued: bool = False

    def __call__(self, t: float) -> Scalar:
        return self.func(t)


class TestFunction(BaseModel):
    """Gaussian-class test function amplitude * exp(-alpha * x**2)."""

    __test__ = False

    name: str
    amplitude: float = Field(1.0, gt=0.0)
    alpha: float = Field(..., gt=0.0)
    kind: Literal["gaussian", "compact_smooth"] = "gaussian"

    def __call__(self, x):
        import numpy as np

        return self.amplitude * np.exp(-self.alpha * np.square(x))


class DecompositionFunction(BaseModel):
    """A function f with antiderivative F, |f(x)| <= L*x and |f'| <= L on [0,1]."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    name: str
    func: Callable
    antiderivative: Callable
    over_x_antiderivative: Callable = Field(..., description="b -> int_0^b f(t)/t dt")
    lipschitz: float = Field(..., ge=0.0)


# ---------------------------------------------------------------------------
# Reports and suite configuration
# ---------------------------------------------------------------------------

class IdentityReport(BaseModel):
    """One verified identity: both sides, their distance and the verdict."""

    identity_id: str = Field(..., min_length=1)
    lhs: Scalar
    rhs: Scalar
    abs_diff: float = Field(..., ge=0.0)
    tolerance: float = Field(..., gt=0.0)
    passed: bool
    anchor: str = Field(..., min_length=1, description="Citation of the verified identity")
    details: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("lhs", "rhs", mode="before")
    @classmethod
    def normalize_sides(cls, v: Any) -> Any:
        return _normalize_scalar(v)

    @model_validator(mode="after")
    def check_verdict(self) -> "IdentityReport":
        if self.passed != (self.abs_diff <= self.tolerance):
            raise ValueError("passed must equal abs_diff <= tolerance")
        return self

    @classmethod
    def build(
        cls,
        identity_id: str,
        lhs: Scalar,
        rhs: Scalar,
        tolerance: float,
        anchor: str,
        details: Optional[Dict[str, Any]] = None,
    ) -> "IdentityReport":
        diff = abs(complex(lhs) - complex(rhs))
        if not math.isfinite(diff):
            diff = math.inf
        return cls(
            identity_id=identity_id,
            lhs=lhs,
            rhs=rhs,
            abs_diff=diff,
            tolerance=tolerance,
            passed=diff <= tolerance,
            anchor=anchor,
            details=details or {},
        )

    def to_record(self) -> Dict[str, Any]:
        """Flat record used by the CSV and JSON-lines writers."""
        return {
            "identity_id": self.identity_id,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "abs_diff": self.abs_diff,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "anchor": self.anchor,
            "details": self.details,
        }


class SuiteConfig(BaseModel):
    """Run configuration for the identity suite."""

    tolerance_overrides: Dict[str, float] = Field(default_factory=dict)
    sieve_bound: int = Field(default_factory=lambda: settings.sieve_bound, ge=10)
    jobs: int = Field(default_factory=lambda: settings.suite_jobs, ge=1)
    output_path: Optional[str] = None
    output_format: Literal["csv", "jsonl"] = Field(default_factory=lambda: settings.output_format)

    @field_validator("tolerance_overrides")
    @classmethod
    def check_positive(cls, v: Dict[str, float]) -> Dict[str, float]:
        for key, tol in v.items():
            if not tol > 0:
                raise ValueError(f"tolerance override for {key} must be positive")
        return v


class SuiteRun(BaseModel):
    """Outcome of one suite run in canonical identity order."""

    reports: List[IdentityReport] = Field(default_factory=list)
    errors: Dict[str, str] = Field(default_factory=dict, description="Engine errors by identity id")

    @property
    def total(self) -> int:
        return len(self.reports) + len(self.errors)

    @property
    def passed(self) -> int:
        return sum(1 for r in self.reports if r.passed)

    @property
    def failed(self) -> int:
        return len(self.reports) - self.passed

    @property
    def exit_code(self) -> int:
        """0 when everything passed, 1 when an identity failed, 2 on an engine error."""
        if self.errors:
            return 2
        return 1 if self.failed else 0

    @property
    def status(self) -> str:
        return {0: "all_passed", 1: "failures", 2: "engine_error"}[self.exit_code]


# ---------------------------------------------------------------------------
# API models
# ---------------------------------------------------------------------------

class VerifyRequest(BaseModel):
    """Request model for the verify endpoint."""

    selectors: List[str] = Field(default_factory=lambda: ["all"], description="Identity selectors (wildcards allowed)")
    tolerances: Dict[str, float] = Field(default_factory=dict, description="Tolerance overrides by identity id")
    jobs: Optional[int] = Field(None, ge=1, le=64, description="Worker threads (overrides config)")

    @field_validator("selectors")
    @classmethod
    def validate_selectors(cls, v: List[str]) -> List[str]:
        cleaned = [s.strip() for s in v if s and s.strip()]
        if not cleaned:
            raise ValueError("at least one selector is required")
        return cleaned

    @field_validator("tolerances")
    @classmethod
    def validate_tolerances(cls, v: Dict[str, float]) -> Dict[str, float]:
        if any(not tol > 0 for tol in v.values()):
            raise ValueError("tolerance overrides must be positive")
        return v


class VerifyResponse(BaseModel):
    """Response model for the verify endpoint."""

    status: str = Field(..., description="all_passed, failures or engine_error")
    timestamp: str
    total: int
    passed: int
    failed: int
    errors: Dict[str, str] = Field(default_factory=dict, description="Engine errors by identity id")
    reports: List[Dict[str, Any]] = Field(default_factory=list)
    report_file: Optional[str] = Field(None, description="Location of the persisted run")


class EvalRequest(BaseModel):
    """Request model for the eval endpoint."""

    kind: str = Field(..., description="Series kind or power-series form")
    re: float = Field(..., description="Real part of the argument")
    im: float = Field(0.0, description="Imaginary part of the argument")
    s: Optional[float] = Field(None, description="Exponent for chi and chi_tilde")
    nu: Optional[float] = Field(None, description="Index for G_nu")
    tail_tolerance: Optional[float] = Field(None, gt=0.0)


class EvalResponse(BaseModel):
    """Response model for the eval endpoint."""

    kind: str
    value: ComplexValue
    error_bound: float
    terms: Optional[int] = None


class IdentityInfo(BaseModel):
    identity_id: str
    anchor: str
    tolerance: Optional[float] = Field(None, description="Default tolerance; null when the check certifies its own bound")
    slow: bool = False


class FranelResponse(BaseModel):
    """Closed form and oracle value of a second-kind Franel integral."""

    n: int
    m: int
    closed_form: str
    value: float
    oracle: float
    oracle_bound: float
    abs_diff: float
