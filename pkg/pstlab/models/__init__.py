"""Models — validated domain types and file schemas."""
