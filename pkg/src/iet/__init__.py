"""Interval exchange transformations and recurrence diagnostics."""
