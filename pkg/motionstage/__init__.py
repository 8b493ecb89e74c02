"""motionstage: scene synthesis, physical metrics and timing tools for two-character motion."""

__version__ = "0.1.0"
