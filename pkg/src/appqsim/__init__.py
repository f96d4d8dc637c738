"""Application-oriented quantum simulation benchmarks: circuits, simulators, oracles and scores."""

__version__ = "0.1.0"
