from ._core import AvgcyclesError, Model, __version__, reproduce, roots, validate_center

__all__ = ["AvgcyclesError", "Model", "__version__", "reproduce", "roots", "validate_center"]
