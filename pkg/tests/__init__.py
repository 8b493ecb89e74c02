"""Tests for motionstage."""
