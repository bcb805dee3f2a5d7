"""Domain layer: geometry, graphs, correspondences and covers."""
