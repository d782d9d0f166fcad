"""Tests for nipreg."""
