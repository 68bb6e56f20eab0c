"""Flattening of caustic components into generalized polygons."""
