"""Tests for the primal-dual toolkit."""
