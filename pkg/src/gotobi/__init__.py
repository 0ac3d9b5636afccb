"""Gotobi-anomaly intraday statistics and backtests on minute USD/JPY quotes."""

__version__ = "0.1.0"
