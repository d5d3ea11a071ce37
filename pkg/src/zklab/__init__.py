"""Exact small-instance laboratory for hash-verifier extraction from black-box quantum simulators."""

__version__ = "0.1.0"
