"""Exact complexity surrogates, identity certificates and transmission games
for two-receiver networks."""

__version__ = "0.1.0"
