"""Test suite for ctw_sp."""
