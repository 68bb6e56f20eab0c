"""Nibbled-ellipse billiards: flattening, unfolding and unique-ergodicity checks."""
