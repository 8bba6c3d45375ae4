"""Ricci-flow geometries, star filtrations and persistence diagrams."""
