"""mubqkd-mcp - two-way deterministic d-ary QKD over mutually unbiased bases."""

__version__ = "0.3.0"
