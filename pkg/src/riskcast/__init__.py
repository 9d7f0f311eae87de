"""riskcast: multi-horizon financial risk forecasting engine.

Library surface is organized by concern:

* ``riskcast.market_math`` — returns, realized log-vol, pinball loss,
  historical VaR, error percentages;
* ``riskcast.bayes`` — Bayesian VAR of realized log-vols with MCMC and
  convergence diagnostics;
* ``riskcast.neural`` — from-scratch differentiable fusion network
  (attention, BiLSTM, additive fusion, multi-task loss, Adam);
* ``riskcast.train`` — dataset manifests, embedding files, training loop,
  grid search, ablations, synthetic fixtures;
* ``riskcast.analyzer`` — LLM-facing transcript/news pipelines over a chat
  completion + embedding client contract, with a deterministic mock;
* ``riskcast.backtest`` — rolling-window backtesting with time decay;
* ``riskcast.cli`` — batch command-line interface.
"""

__version__ = "0.1.0"
