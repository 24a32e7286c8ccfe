"""Othello move predictors learned from expert games, and the tools to measure them."""

__version__ = "0.1.0"
