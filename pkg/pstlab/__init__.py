"""pstlab — design and analysis of timing-insensitive perfect state transfer chains."""

from __future__ import annotations

__version__ = "0.1.0"
