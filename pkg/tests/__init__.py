"""Tests for the optimisation library, its CLI and HTTP service."""
