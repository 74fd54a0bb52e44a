"""
Test suite for the HLZeta workbench

- unit/: one numerical service, model or helper at a time
- integration/: identity suite, CLI and report store
- api/: HTTP API
"""

__version__ = "1.0.0"
