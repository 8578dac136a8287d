"""Movement-primitive engine, tabletop simulator, and chat-model pipeline."""

__version__ = "0.1.0"
