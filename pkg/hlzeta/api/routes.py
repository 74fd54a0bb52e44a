"""
FastAPI routes for the HLZeta workbench.
"""
from typing import Any, Dict, List

from fastapi import APIRouter, HTTPException, Path
from fastapi.concurrency import run_in_threadpool

from hlzeta.core.config import settings
from hlzeta.core.exceptions import HLZetaException
from hlzeta.models.schemas import (
    ComplexValue,
    EvalRequest,
    EvalResponse,
    FranelResponse,
    IdentityInfo,
    SuiteConfig,
    TruncationPolicy,
    VerifyRequest,
    VerifyResponse,
)
from hlzeta.services import franel, hlseries
from hlzeta.services.report_store import report_store
from hlzeta.services.suite import identity_suite
from hlzeta.utils.helpers import generate_timestamp
from hlzeta.utils.logger import logger

# Create router
router = APIRouter()


@router.get("/identities", response_model=List[IdentityInfo])
async def list_identities() -> List[IdentityInfo]:
    """List every registered identity in canonical order."""
    return identity_suite.list_identities()


@router.post("/verify", response_model=VerifyResponse)
async def verify(request: VerifyRequest) -> VerifyResponse:
    """
    Run the identity checks matched by the selectors.

    Args:
        request: Selectors, tolerance overrides and worker count

    Returns:
        Verdicts in canonical order, with engine errors listed separately
    """
    try:
        logger.info("verify requested", selectors=request.selectors)
        config = SuiteConfig(
            tolerance_overrides=request.tolerances,
            jobs=request.jobs or settings.suite_jobs,
        )
        run = await run_in_threadpool(identity_suite.run, request.selectors, config)

        report_file = None
        if settings.save_reports:
            report_file = await report_store.save_run(run, request.selectors)

        return VerifyResponse(
            status=run.status,
            timestamp=generate_timestamp(),
            total=run.total,
            passed=run.passed,
            failed=run.failed,
            errors=run.errors,
            reports=[report.to_record() for report in run.reports],
            report_file=report_file,
        )

    except HLZetaException:
        raise
    except Exception as e:
        logger.error(f"Unexpected error in verify endpoint: {e}")
        raise HTTPException(
            status_code=500,
            detail=f"Internal server error: {str(e)}"
        )


@router.post("/eval", response_model=EvalResponse)
async def evaluate(request: EvalRequest) -> EvalResponse:
    """
    Evaluate a series kind or power-series form at a point.

    Args:
        request: Kind, argument and optional s, nu and tail tolerance

    Returns:
        Value with its certified error bound
    """
    policy = TruncationPolicy(tail_tolerance=request.tail_tolerance) if request.tail_tolerance else None
    try:
        result = await run_in_threadpool(
            hlseries.eval_named,
            request.kind,
            complex(request.re, request.im),
            request.s,
            request.nu,
            policy,
        )
    except HLZetaException:
        raise
    except Exception as e:
        logger.error(f"Unexpected error in eval endpoint: {e}")
        raise HTTPException(
            status_code=500,
            detail=f"Internal server error: {str(e)}"
        )
    return EvalResponse(
        kind=request.kind,
        value=ComplexValue.of(result.value),
        error_bound=result.error_bound,
        terms=result.terms,
    )


@router.get("/franel2/{n}/{m}", response_model=FranelResponse)
async def franel2(
    n: int = Path(..., ge=1, le=12),
    m: int = Path(..., ge=1, le=12),
) -> FranelResponse:
    """Certified closed form of the second-kind Franel integral I_(n,m)."""
    closed = await run_in_threadpool(franel.franel2_closed, n, m)
    oracle = await run_in_threadpool(franel.franel2_oracle, n, m)
    value = closed.evaluate()
    return FranelResponse(
        n=n,
        m=m,
        closed_form=str(closed),
        value=value,
        oracle=float(oracle.value),
        oracle_bound=oracle.error_bound,
        abs_diff=abs(value - float(oracle.value)),
    )


@router.get("/reports")
async def list_reports() -> List[Dict[str, Any]]:
    """List persisted verify runs, newest first."""
    return await report_store.list_runs()
