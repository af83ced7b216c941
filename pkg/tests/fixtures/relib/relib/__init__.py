"""Fixture library whose implementation hides in a private module."""

from relib._impl import transform

__all__ = ["transform"]
