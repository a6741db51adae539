"""Test suite for the bandwidth-extension engine."""
