"""Chart-level tensor calculus for metallic structures J^2 = aJ + bI."""

__version__ = "0.1.0"
