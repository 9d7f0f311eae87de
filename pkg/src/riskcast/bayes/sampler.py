"""MCMC posterior sampling for the four-equation volatility VAR.

Sampling is Metropolis-within-Gibbs per chain. Because the prior on each
equation's coefficient block is Normal and the likelihood is Gaussian, the
block's full conditional given the noise sd is itself Gaussian, so the block
is drawn exactly (a Gibbs step). The noise sd, which carries a half-Normal
prior, is updated by random-walk Metropolis on the log scale; its step size
adapts during warmup only and is frozen afterwards.

Chains use independent generators derived from (seed, chain index), so serial
and parallel execution produce identical draws.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NumericalFailureError
from .diagnostics import hdi
from .model import (
    McmcConfig,
    PARAM_HORIZONS,
    VarModelSpec,
    alpha_name,
    beta_name,
    sigma_name,
)
from .panel import LogVolPanel

_N_REG = len(PARAM_HORIZONS)  # backward regressors per equation


@dataclass(frozen=True)
class Chains:
    """Posterior draws, one (n_chains, n_draws) array per parameter."""

    params: dict
    n_obs: int
    spec: VarModelSpec
    cfg: McmcConfig

    def names(self):
        return list(self.params.keys())

    def draws(self, name: str) -> np.ndarray:
        return self.params[name]

    def flat(self, name: str) -> np.ndarray:
        return self.params[name].reshape(-1)


def sample_posterior(panel: LogVolPanel, spec: VarModelSpec, cfg: McmcConfig) -> Chains:
    """Sample the posterior of all four equations.

    Output is fully determined by (panel, spec, cfg): every chain owns a
    generator seeded by (cfg.seed, chain index).
    """
    panel.require_nonempty()
    X = np.column_stack([np.ones(len(panel)), panel.backward])
    params = _allocate(spec, cfg)
    for c in range(cfg.n_chains):
        rng = np.random.default_rng([cfg.seed, c])
        for j, m in enumerate(PARAM_HORIZONS):
            theta, sigma = sample_equation(X, panel.forward[:, j], spec, cfg, rng)
            _store(params, m, c, theta, sigma, spec)
    return Chains(params=params, n_obs=len(panel), spec=spec, cfg=cfg)


def sample_equation(X: np.ndarray, y: np.ndarray, spec: VarModelSpec,
                    cfg: McmcConfig, rng: np.random.Generator):
    """Run one chain for one equation; returns (theta draws, sigma draws).

    ``X`` may have zero rows, in which case the coefficient full conditional
    collapses to the prior (used by prior-recovery checks).
    """
    n, p = X.shape
    XtX = X.T @ X
    Xty = X.T @ y
    if not (np.all(np.isfinite(XtX)) and np.all(np.isfinite(Xty))):
        raise NumericalFailureError(
            "non-finite design products", diagnostics={"XtX": XtX, "Xty": Xty}
        )
    prior_mean = np.asarray(spec.prior_mean_vector())
    prior_prec = 1.0 / np.asarray(spec.prior_sd_vector()) ** 2

    estimate_sigma = spec.noise == "estimate"
    sigma = 1.0
    log_sigma = 0.0
    step = cfg.initial_step
    accepted = 0
    proposed = 0

    theta = prior_mean.copy()
    sse = _sse(X, y, theta)
    thetas = np.empty((cfg.n_draws, p))
    sigmas = np.empty(cfg.n_draws)
    total = cfg.n_warmup + cfg.n_draws

    for it in range(total):
        # coefficient block: exact Gaussian full conditional
        prec = XtX / sigma**2 + np.diag(prior_prec)
        try:
            L = np.linalg.cholesky(prec)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailureError(
                "conditional precision not positive definite",
                diagnostics={"iteration": it, "sigma": sigma},
            ) from exc
        rhs = Xty / sigma**2 + prior_mean * prior_prec
        mean = np.linalg.solve(prec, rhs)
        z = rng.standard_normal(p)
        theta = mean + np.linalg.solve(L.T, z)
        sse = _sse(X, y, theta)
        if not np.isfinite(sse):
            raise NumericalFailureError(
                "non-finite residual sum of squares",
                diagnostics={"iteration": it, "theta": theta},
            )

        if estimate_sigma:
            # random-walk Metropolis on log(sigma); half-Normal prior plus
            # the log-transform Jacobian. The conditional is univariate and
            # cheap, so several sub-steps per scan keep sigma well mixed.
            for _ in range(cfg.sigma_steps):
                prop = log_sigma + step * rng.standard_normal()
                log_acc = (_log_post_sigma(prop, n, sse, spec.noise_prior_scale)
                           - _log_post_sigma(log_sigma, n, sse, spec.noise_prior_scale))
                proposed += 1
                if np.log(rng.random()) < log_acc:
                    log_sigma = prop
                    sigma = np.exp(log_sigma)
                    accepted += 1
            if it < cfg.n_warmup and proposed >= cfg.adapt_interval:
                rate = accepted / proposed
                if rate > 0.5:
                    step *= 1.1
                elif rate < 0.3:
                    step /= 1.1
                accepted = 0
                proposed = 0

        if it >= cfg.n_warmup:
            thetas[it - cfg.n_warmup] = theta
            sigmas[it - cfg.n_warmup] = sigma
    return thetas, sigmas


def posterior_predict(chains: Chains, latest_backward_logvols,
                      include_noise: bool = True, noise_seed: int = 0) -> dict:
    """Predictive mean and 94% interval per forward horizon.

    Each posterior draw's (alpha, beta) is pushed through the linear form at
    the supplied backward log-vols; optionally a noise draw sigma*eps is
    added. Intervals and means are reported on the log scale and on the
    exp-transformed volatility scale.
    """
    x = np.asarray(latest_backward_logvols, dtype=np.float64)
    if x.shape != (_N_REG,) or not np.all(np.isfinite(x)):
        raise ValueError(f"expected {_N_REG} finite backward log-vols, got {x!r}")
    rng = np.random.default_rng([chains.cfg.seed, 0x9E3779B9, noise_seed])
    out = {}
    for m in PARAM_HORIZONS:
        alpha = chains.flat(alpha_name(m))
        betas = np.stack([chains.flat(beta_name(m, k)) for k in PARAM_HORIZONS], axis=1)
        lin = alpha + betas @ x
        if include_noise:
            sig = chains.flat(sigma_name(m)) if sigma_name(m) in chains.params else 1.0
            lin = lin + sig * rng.standard_normal(lin.shape[0])
        if not np.all(np.isfinite(lin)):
            raise NumericalFailureError(f"non-finite predictive draws for horizon {m}")
        log_lo, log_hi = hdi(lin, 0.94)
        vol = np.exp(lin)
        lo, hi = hdi(vol, 0.94)
        out[m] = {
            "log_mean": float(lin.mean()),
            "log_hdi_3": log_lo,
            "log_hdi_97": log_hi,
            "mean": float(vol.mean()),
            "hdi_3": lo,
            "hdi_97": hi,
        }
    return out


def _sse(X, y, theta) -> float:
    if X.shape[0] == 0:
        return 0.0
    resid = y - X @ theta
    return float(resid @ resid)


def _log_post_sigma(log_sigma: float, n: int, sse: float, prior_scale: float) -> float:
    sigma = np.exp(log_sigma)
    loglik = -n * log_sigma - sse / (2.0 * sigma**2)
    logprior = -(sigma**2) / (2.0 * prior_scale**2)
    return loglik + logprior + log_sigma  # + log_sigma: Jacobian of exp


def _allocate(spec: VarModelSpec, cfg: McmcConfig) -> dict:
    shape = (cfg.n_chains, cfg.n_draws)
    params = {}
    for m in PARAM_HORIZONS:
        params[alpha_name(m)] = np.empty(shape)
        for k in PARAM_HORIZONS:
            params[beta_name(m, k)] = np.empty(shape)
        if spec.noise == "estimate":
            params[sigma_name(m)] = np.empty(shape)
    return params


def _store(params, m, chain, thetas, sigmas, spec):
    params[alpha_name(m)][chain] = thetas[:, 0]
    for i, k in enumerate(PARAM_HORIZONS):
        params[beta_name(m, k)][chain] = thetas[:, i + 1]
    if spec.noise == "estimate":
        params[sigma_name(m)][chain] = sigmas
