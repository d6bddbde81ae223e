"""Agent-based model of farm economics, land consolidation and farmland biodiversity."""

__version__ = "0.1.0"
