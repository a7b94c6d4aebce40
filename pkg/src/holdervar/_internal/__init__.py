"""Internal helpers: pair scans and distance matrices."""
