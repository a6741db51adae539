"""Framed spectral analysis, ERB/phase helpers and bandwidth simulation."""
