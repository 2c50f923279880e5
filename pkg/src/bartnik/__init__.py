"""Charged Bartnik extensions of minimal data.

This package constructs asymptotically flat, time-symmetric initial data with
an electric field that satisfy the dominant energy condition, have a given
minimal 2-sphere with charge as boundary and agree with a Reissner–Nordström
manifold of any prescribed mass above the boundary's charged Hawking mass
outside a compact set. Every construction is certified by recomputing its
curvature, flux, mass and junction checks from the raw samples.

Main modules:
- sphere_geometry: Axisymmetric metrics on S², curvature, eigenpairs of
  -Δ + K, uniformization
- metric_path: Conformal paths to the round sphere and their normalization
- rotsym_core: Rotationally symmetric charged profiles and
  Reissner–Nordström solutions
- glue_bend: Bending, bridging and gluing of profiles
- collar_builder: Collar extensions and their neck
- pipeline: Admissibility, construction and verification
- exporters: CSV and JSON dumps
- cli: The ``charged-extension`` command
- config: Configuration constants and run-file models
- errors: Typed failures with pipeline stages

Data types:
- data_types.construction: Selection, bend, bridge and attachment reports
- data_types.report: Admissibility, slice and extension reports
"""
