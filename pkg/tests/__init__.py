"""Tests for the charged Bartnik extension toolkit.

This package contains unit tests for all modules in the bartnik package,
checking the constructions against closed forms (round spheres,
Reissner–Nordström profiles) and against independent recomputations.
"""
