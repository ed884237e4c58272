"""
rlplab
Square functions over arbitrary frequency families, sparse domination and weights
"""

from .core.config import settings

__version__ = settings.APP_VERSION

__all__ = ["__version__", "settings"]
