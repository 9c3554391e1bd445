"""Site-level classification from multi-band raster patches with
multi-relation graph attention over geographic neighbourhoods."""

__version__ = "0.1.0"
