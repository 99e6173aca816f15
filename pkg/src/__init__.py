"""
CHoS Quantum Memory Simulator

This package models light storage by controlled homogeneous splitting of a
two-line absorber:
- model: medium constants, units, splitting schedules, probe pulse and grid
- spectral: closed-form susceptibility, group delay and dark-state analysis
- mb_solver: time-domain Maxwell-Bloch propagation and storage runs
- metrics: fidelity, delay and energy bookkeeping
- sweep: heatmaps, splitting optimization and scaling checks
- cli: command-line front end
"""

from .config import Config, get_config

__version__ = "0.1.0"
__all__ = ["Config", "get_config"]
