"""Core settings, schemas, errors and domain types."""
