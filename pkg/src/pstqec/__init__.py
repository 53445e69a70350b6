"""Error correction for fermionic state transfer along engineered XX spin chains."""

__version__ = "0.1.0"
