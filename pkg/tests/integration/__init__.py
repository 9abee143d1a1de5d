"""Integration tests for CLI runs and the seeded property suites."""
