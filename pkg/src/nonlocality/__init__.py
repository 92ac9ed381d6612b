"""Multipartite nonlocality criteria for spin-J systems.

Builds spin states (GHZ, correlated qudit families, two-mode BEC ground
states), evaluates entanglement / EPR-steering / Bell moment inequalities and
collective spin-squeezing bounds, and checks every classical bound against a
brute-force local-hidden-variable oracle.
"""

__version__ = "0.1.0"
