"""codesim: feature-based similarity search over C functions."""

__version__ = "0.1.0"

EXTRACTOR_VERSION = "1"
DB_FORMAT_VERSION = 1
