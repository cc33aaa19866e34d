"""Conditional GAN trainers for the SGAN, WGAN and relativistic loss families."""
