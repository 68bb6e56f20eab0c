"""Translation flow, first-return maps and Birkhoff averages."""
