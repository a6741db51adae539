"""Streaming speech bandwidth-extension engine."""
