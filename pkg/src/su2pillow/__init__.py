"""SU(2) character varieties, pillowcase geometry and surgery obstructions."""

__version__ = "0.1.0"
