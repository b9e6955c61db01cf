"""embedbench: compare random-walk network embeddings against graph metrics."""

__version__ = "0.1.0"
