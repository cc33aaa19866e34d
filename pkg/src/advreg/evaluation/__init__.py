"""Distances, moments and evaluation of generated conditional distributions."""
