"""Cluster-based Tomlinson-Harashima precoding for cell-free MU-MIMO downlink."""

__version__ = "0.1.0"
