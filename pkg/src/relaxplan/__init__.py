"""Plan household tasks from scene graphs, repairing and relaxing goals until a grounded plan exists."""

__version__ = "0.1.0"
