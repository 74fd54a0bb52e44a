"""
Integration Tests

Tests that run several components together:
- Identity suite registry and runner
- CLI verbs and their report streams
- Persisted verify runs
"""
