"""Utility modules for polydyn."""
