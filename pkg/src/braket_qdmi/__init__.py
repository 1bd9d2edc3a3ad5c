"""Quantum device-management interface backed by a Braket-style cloud task API."""

__version__ = "0.1.0"
