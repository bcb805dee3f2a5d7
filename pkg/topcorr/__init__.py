"""Topological graphs, their C*-correspondences and explicit equivalences."""

__version__ = "0.1.0"
