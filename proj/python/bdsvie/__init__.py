"""Monte Carlo solver for backward doubly stochastic Volterra integral equations."""

from ._core import (
    BrownianEnsemble,
    ContractionCertificate,
    TimeGrid,
    __version__,
    build_certificate,
    catalog_names,
    run_cli,
    sample_ensemble,
    solve_catalog,
    validate_expression,
)

__all__ = [
    "BrownianEnsemble",
    "ContractionCertificate",
    "TimeGrid",
    "__version__",
    "build_certificate",
    "catalog_names",
    "run_cli",
    "sample_ensemble",
    "solve_catalog",
    "validate_expression",
]
