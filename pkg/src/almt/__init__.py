"""Budget-constrained active-learning data selection for MT domain adaptation."""

__version__ = "0.1.0"
