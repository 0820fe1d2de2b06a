"""Exact Hecke eigenvalue tables for rational newforms, and finite-truncation
checks of how often one form's normalized eigenvalues dominate another's."""

from .catalog import (
    DeltaTimes,
    EigenvalueTable,
    EtaQuotient,
    FormSpec,
    audit_hecke,
    builtin_catalog,
    elliptic_ap,
    expand,
    get_form,
)
from .density import analytic_density_proxy, dirichlet_sum, natural_density, sieve
from .hecke import (
    Ordering,
    a_prime_power,
    chebyshev_P,
    dominance_compare,
    normalized_value,
    satake_angle,
    square_dominance_compare,
    sym_power_lambda,
)
from .io import load_table, save_table
from .qseries import QSeries, eisenstein, eta_factor, sigma
from .verify import (
    cm_detect,
    moment_report,
    partition,
    proposition_ratio,
    theorem_audit,
    twist_detect,
)

__version__ = "0.1.0"
