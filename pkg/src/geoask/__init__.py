"""geoask: natural-language question answering over a geospatial knowledge graph."""

__version__ = "0.1.0"
