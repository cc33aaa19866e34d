"""This is just here to make mypy stop complaining about duplicate conftests."""
