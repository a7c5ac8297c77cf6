"""Inversion functions, local sorting and shellings for capacity trees."""

from .tree import CapacityTree, TreeError, format_tree, parse_tree, path_tree, star_tree

__all__ = ["CapacityTree", "TreeError", "format_tree", "parse_tree", "path_tree", "star_tree"]
