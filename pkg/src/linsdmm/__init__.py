"""Linear secure distributed matrix multiplication toolkit."""
__version__ = "0.1.0"
