"""Dense array math, reverse-mode differentiation and optimizers."""
