"""Core module — config, exceptions, logging."""
