"""Model and sampler configuration for the four-equation volatility VAR.

Each forward horizon m in {3, 7, 15, 30} gets one regression equation:

    fwd_m = alpha_m + sum_k beta_{m,k} * bwd_k + u_m

with Normal priors on intercepts and coefficients. The noise u_m is either
N(0, sigma_m^2) with sigma_m estimated under a half-Normal prior (default)
or fixed at N(0, 1) (``noise="fixed_unit"``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..market_math import LABEL_HORIZONS

PARAM_HORIZONS = LABEL_HORIZONS

NOISE_MODES = ("estimate", "fixed_unit")


@dataclass(frozen=True)
class VarModelSpec:
    intercept_prior_mean: float = -3.0
    intercept_prior_sd: float = 1.0
    beta_prior_mean: float = 0.0
    beta_prior_sd: float = 1.0
    noise: str = "estimate"
    noise_prior_scale: float = 1.0

    def __post_init__(self):
        if self.intercept_prior_sd <= 0 or self.beta_prior_sd <= 0:
            raise ValueError("prior sds must be positive")
        if self.noise not in NOISE_MODES:
            raise ValueError(f"noise mode must be one of {NOISE_MODES}")
        if self.noise_prior_scale <= 0:
            raise ValueError("noise prior scale must be positive")

    def prior_mean_vector(self):
        # intercept first, then one slot per backward regressor
        return [self.intercept_prior_mean] + [self.beta_prior_mean] * len(PARAM_HORIZONS)

    def prior_sd_vector(self):
        return [self.intercept_prior_sd] + [self.beta_prior_sd] * len(PARAM_HORIZONS)


@dataclass(frozen=True)
class McmcConfig:
    n_chains: int = 4
    n_warmup: int = 1000
    n_draws: int = 2000
    seed: int = 0
    initial_step: float = 0.5
    adapt_interval: int = 50
    sigma_steps: int = 3  # RW sub-steps per scan for the noise sd

    def __post_init__(self):
        if self.n_chains < 2:
            raise ValueError("at least 2 chains are required for R-hat")
        if self.n_draws < 1:
            raise ValueError("need at least 1 post-warmup draw")
        if self.n_warmup < 0:
            raise ValueError("warmup cannot be negative")
        if self.initial_step <= 0:
            raise ValueError("initial proposal step must be positive")
        if self.adapt_interval < 1:
            raise ValueError("adaptation interval must be >= 1")
        if self.sigma_steps < 1:
            raise ValueError("need at least one noise-sd update per scan")


def alpha_name(m: int) -> str:
    return f"alpha[{m}]"


def beta_name(m: int, k: int) -> str:
    return f"beta[{m},{k}]"


def sigma_name(m: int) -> str:
    return f"sigma[{m}]"


def coefficient_names(noise: str = "estimate") -> list[str]:
    """Flat parameter order: per equation, intercept, betas, then noise sd."""
    names = []
    for m in PARAM_HORIZONS:
        names.append(alpha_name(m))
        names.extend(beta_name(m, k) for k in PARAM_HORIZONS)
        if noise == "estimate":
            names.append(sigma_name(m))
    return names
