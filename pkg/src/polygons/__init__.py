"""Staircase polygons, the reflection group and generalized polygons."""
