"""Tests for hermite-kinetics."""
