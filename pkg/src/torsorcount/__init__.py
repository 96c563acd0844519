"""Counting rational points of bounded height on the A3+A1 quartic del Pezzo
surface through its universal torsor, together with the arithmetic and
analytic machinery behind the leading constant."""

__version__ = "0.1.0"
