"""Command-line surface — one module per command group, aggregated in router.py."""
