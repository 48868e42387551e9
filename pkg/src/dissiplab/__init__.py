"""Desk-scale workbench for dissipative quantum computation and
steady-state engineering: Lindblad generators and their spectra, Kraus
channels, circuit-to-dissipation compilers, frustration-free ground-state
preparation, matrix-product-state channels, and ancilla-based reservoir
engineering."""

__version__ = "0.1.0"
