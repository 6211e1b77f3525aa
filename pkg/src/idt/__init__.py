"""A small dependently-typed language with inductive definitions elaborated
down to a universe of description codes."""

__version__ = "0.1.0"
