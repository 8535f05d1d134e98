"""Services — chain synthesis, dynamics, bounds, revival, encoding, robustness and files."""
