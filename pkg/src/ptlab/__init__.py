"""PT-symmetric scattering and bound-state lab."""

__version__ = "0.1.0"
