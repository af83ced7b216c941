"""apislim: mine real-world usage of a Python library and generate a smaller API.

The toolchain reads a library's source tree, counts how client programs
actually call it, and turns those observations into annotations that drive
a generated wrapper package exposing only what is used.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .model import ApiModel, LiteralValue, QualifiedName

__all__ = ["ApiModel", "LiteralValue", "QualifiedName", "__version__"]
