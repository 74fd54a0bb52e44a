"""
Unit Tests

Tests for individual services and helpers.
"""
