"""Minimal-model data, anomaly-corrected clipped-triangle weights, and exact lattice rewritings."""
