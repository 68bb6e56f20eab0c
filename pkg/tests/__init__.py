"""Tests for the nibbled-ellipse billiard toolkit."""
