#!/usr/bin/env python3
"""
Startup script for the HLZeta Workbench API.

Builds the arithmetic sieve, then serves the API.
"""
import sys

import uvicorn
from hlzeta.core.config import settings
from hlzeta.services.specfun import sieve
from hlzeta.utils.logger import logger


def main() -> int:
    """Warm the sieve, then start the workbench API server."""
    logger.info("Starting HLZeta Workbench API", host=settings.api_host, port=settings.api_port)

    sieve.mobius(sieve.bound)
    logger.info("Sieve built", bound=sieve.bound)

    uvicorn.run(
        "hlzeta.main:app",
        host=settings.api_host,
        port=settings.api_port,
        reload="--reload" in sys.argv[1:],
        log_level=settings.log_level.lower(),
        access_log=True,
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
