"""tuberaid: comment-activity peak detection and source-community attribution."""

__version__ = "0.1.0"
