"""Network graph, weights and streaming engine."""
