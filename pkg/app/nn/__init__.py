"""Neural compute kernels."""
