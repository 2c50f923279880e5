"""Data types for the extension toolkit.

This package contains TypedDict definitions for the JSON reports written by
the construction stages: admissibility gates, amplitude and neck selection,
bends and bridges, slice diagnostics and the final extension report.
"""
