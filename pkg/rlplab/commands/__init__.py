"""Commands package initialization"""

from . import experiments, signals, sparse, tiles, weights


def register_all(subparsers) -> None:
    """Attach every sub-command to the top-level parser"""
    for module in (signals, sparse, tiles, weights, experiments):
        module.register(subparsers)


__all__ = ["register_all"]
