"""designmine: mine design-community comments into a knowledge taxonomy,
rank and serve posts by it, and keep learner mindmap notes."""

__version__ = "0.1.0"
