"""Smallest-gap statistics of Gaussian ensembles.

Exact Pfaffian and oscillator-function machinery for log-gas partition
identities, seeded samplers for the Gaussian orthogonal and beta ensembles,
and gap-statistics estimators with their limiting laws.
"""

__version__ = "0.1.0"
