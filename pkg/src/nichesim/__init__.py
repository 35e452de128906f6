"""Co-evolving sender and receiver populations sharing a 9-band soundscape."""

__version__ = "0.1.0"
