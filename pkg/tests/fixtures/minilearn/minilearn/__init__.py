"""Minimal learning library used as an analysis fixture."""

from minilearn.models import SVC, Lasso, Ridge

__all__ = ["Ridge", "Lasso", "SVC"]
