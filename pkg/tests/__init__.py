"""Test suite for the Entropy Portfolio Lab."""
