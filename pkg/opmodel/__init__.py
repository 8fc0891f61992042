"""opmodel: statistical models, effects and classical extensions of quantum mechanics."""

__version__ = "1.0.0"
