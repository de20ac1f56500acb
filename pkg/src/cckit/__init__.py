"""cckit: a workbench for key distillation, conjugate-coding
authentication with key recycling, and composable error accounting."""

__version__ = "0.1.0"
