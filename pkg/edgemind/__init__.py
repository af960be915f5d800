"""EdgeMind: edge RAN-controller clustering and user-count forecasting on cellular traces."""

__version__ = "0.1.0"
