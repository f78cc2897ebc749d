"""shiftlab: combinatorics of subshifts over Z^d and free groups."""

__version__ = "0.1.0"
