"""Dirichlet L-functions over F_q[T]: enumeration, L-polynomials, moments, prime sums."""

from ._core import (
    ConfigError,
    DomainError,
    F_sum,
    Family,
    ParseError,
    factor,
    irreducibles,
    is_irreducible,
    log_min_estimate,
    mertens_cos_sum,
    normalize,
    prime_count,
    prime_count_sieve,
    prime_power_tail,
    run_suite,
    zeta_log_estimate,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "F_sum",
    "Family",
    "ParseError",
    "factor",
    "irreducibles",
    "is_irreducible",
    "log_min_estimate",
    "mertens_cos_sum",
    "normalize",
    "prime_count",
    "prime_count_sieve",
    "prime_power_tail",
    "run_suite",
    "zeta_log_estimate",
]
