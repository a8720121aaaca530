"""Local constants of triple-product periods for GL(2) over Q_p, with brute-force oracles."""

__version__ = "0.1.0"
