"""Service modules for polydyn."""
