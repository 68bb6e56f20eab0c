"""Wronskian and bracket verification of the unique-ergodicity criterion."""
