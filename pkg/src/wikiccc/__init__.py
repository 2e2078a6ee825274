"""Cultural context content (CCC) classification for Wikipedia-like snapshots."""

from ._kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
