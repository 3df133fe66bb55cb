"""Rate regions, strong-interference checks and coding simulation for the
three-user cognitive interference channel."""

__version__ = "0.1.0"
