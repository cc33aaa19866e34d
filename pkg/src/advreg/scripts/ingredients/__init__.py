"""Sacred ingredients shared between scripts."""
