"""Seeded stochastic simulation: variates, Monte Carlo, Markov chains, diffusions, SSA and MCMC."""

__version__ = "0.1.0"
