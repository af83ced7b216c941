"""Minimal learning library used as an analysis fixture, second release."""

from minilearn.models import ElasticNet, Lasso, Ridge

__all__ = ["Ridge", "Lasso", "ElasticNet"]
