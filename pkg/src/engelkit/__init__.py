"""Exact computations in truncated free Lie rings and free nilpotent groups.

The package has three computational cores: Hall-basis free Lie rings with
graded ideal quotients (hall_lie, lie_examples), weighted polycyclic
collection for free nilpotent groups and their quotients (nilgroup), and
word combinatorics (standard_words).  sandwich_verifier ties them together
into machine-checkable certificates; cli is the batch runner.
"""

__version__ = "0.1.0"

__all__ = [
    "hall_lie",
    "lie_examples",
    "nilgroup",
    "sandwich_verifier",
    "standard_words",
    "cli",
]
