"""Synthetic regression models, datasets and ground-truth conditionals."""
