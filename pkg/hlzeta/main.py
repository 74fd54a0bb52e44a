"""
FastAPI application for the HLZeta workbench.
"""
import time

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from hlzeta import __version__
from hlzeta.api.routes import router
from hlzeta.core.config import settings
from hlzeta.core.exceptions import (
    BranchError,
    CapacityError,
    ConfigError,
    ConvergenceError,
    DomainError,
    HLZetaException,
    PoleError,
    RegularizationError,
    UnknownIdentityError,
)
from hlzeta.utils.helpers import generate_timestamp
from hlzeta.utils.logger import logger

# Domain exceptions by HTTP status; anything else is a 500
_STATUS_CODES = (
    (UnknownIdentityError, 404),
    ((DomainError, BranchError, PoleError, CapacityError, ConfigError), 400),
    ((ConvergenceError, RegularizationError), 422),
)


def status_for(exc: HLZetaException) -> int:
    for types, code in _STATUS_CODES:
        if isinstance(exc, types):
            return code
    return 500


def create_app() -> FastAPI:
    """Create and configure FastAPI application."""

    # Create FastAPI app
    app = FastAPI(
        title="HLZeta Workbench API",
        description="Numerical verification of the identities around the Hardy-Littlewood series",
        version=__version__,
        docs_url="/docs",
        redoc_url="/redoc",
        openapi_url="/openapi.json"
    )

    # Add CORS middleware
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],  # Configure appropriately for production
        allow_credentials=True,
        allow_methods=["*"],
        allow_headers=["*"],
    )

    # Add request logging middleware
    @app.middleware("http")
    async def log_requests(request: Request, call_next):
        """Log all requests and their processing time."""
        start_time = time.time()

        logger.info("request", method=request.method, url=str(request.url))

        response = await call_next(request)

        process_time = time.time() - start_time
        logger.info(
            "response",
            method=request.method,
            url=str(request.url),
            status=response.status_code,
            seconds=round(process_time, 3),
        )

        response.headers["X-Process-Time"] = str(process_time)

        return response

    @app.exception_handler(HLZetaException)
    async def domain_exception_handler(request: Request, exc: HLZetaException):
        status_code = status_for(exc)
        if status_code >= 500:
            logger.error("request failed", error_type=type(exc).__name__, error=str(exc))
        return JSONResponse(
            status_code=status_code,
            content={
                "error": str(exc),
                "error_type": type(exc).__name__,
                "timestamp": generate_timestamp()
            }
        )

    # Add exception handler for HTTPException
    @app.exception_handler(HTTPException)
    async def http_exception_handler(request: Request, exc: HTTPException):
        return JSONResponse(
            status_code=exc.status_code,
            content={
                "error": exc.detail,
                "error_type": "HTTPException",
                "timestamp": generate_timestamp()
            }
        )

    @app.exception_handler(Exception)
    async def general_exception_handler(request: Request, exc: Exception):
        logger.error(f"Global exception handler caught: {exc}")
        return JSONResponse(
            status_code=500,
            content={
                "error": "Internal server error",
                "error_type": "InternalError",
                "timestamp": generate_timestamp(),
                "details": {"message": str(exc)}
            }
        )

    # Include API routes
    app.include_router(router, prefix="/api/v1")

    # Add startup event
    @app.on_event("startup")
    async def startup_event():
        """Application startup event."""
        logger.info(f"Starting HLZeta Workbench API v{__version__}")
        logger.info(f"API will be available at: http://{settings.api_host}:{settings.api_port}")
        logger.info(f"Documentation available at: http://{settings.api_host}:{settings.api_port}/docs")
        logger.info("sieve configured", bound=settings.sieve_bound, r3_bound=settings.r3_bound)

    # Add shutdown event
    @app.on_event("shutdown")
    async def shutdown_event():
        """Application shutdown event."""
        logger.info("Shutting down HLZeta Workbench API")

    return app


# Create the application instance
app = create_app()


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(
        "hlzeta.main:app",
        host=settings.api_host,
        port=settings.api_port,
        reload=True,  # Enable auto-reload for development
        log_level=settings.log_level.lower()
    )
