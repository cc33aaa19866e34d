"""Generator and discriminator networks and their checkpoints."""
