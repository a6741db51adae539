"""Quality metrics and training-objective terms."""
