"""
HLZeta Workbench
A verification workbench for the identities around the Hardy-Littlewood series
sum(sin(x/n)/n): Franel integrals, sawtooth identities, summation formulas and
theta-function lattice sums, each checked against an independent oracle.
"""

__version__ = "1.0.0"
__author__ = "HLZeta Team"
