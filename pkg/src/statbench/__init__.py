"""statbench: a statistics workbench that transcribes every action into a script."""

__version__ = "0.1.0"
