"""Type D certification for twisted classes of PSL_n(q)."""

__version__ = "0.1.0"
