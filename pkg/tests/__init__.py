"""Test suite for qwalk-action."""
