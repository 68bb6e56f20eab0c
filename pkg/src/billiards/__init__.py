"""Confocal conics, nibbled-ellipse tables and the physical billiard flow."""
