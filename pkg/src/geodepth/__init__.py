"""Geodesic disk depth in simple polygons."""
