"""Python interface to the many-server queue simulation toolkit."""

from ._core import (
    ConfigError,
    des_marginal,
    euler_terminal,
    ks_two_sample,
    limit_params,
    sde_marginal,
    summarize,
    wasserstein1,
    __version__,
)

__all__ = [
    "ConfigError",
    "des_marginal",
    "euler_terminal",
    "ks_two_sample",
    "limit_params",
    "sde_marginal",
    "summarize",
    "wasserstein1",
    "__version__",
]
