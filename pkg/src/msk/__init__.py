"""Inner functions and model-space reproducing kernels on the unit disk."""
