"""Greedy word-level adversarial sample crafting for text classifiers."""

__version__ = "0.1.0"
