"""axifb - numerical workbench for axially symmetric one-phase free boundaries."""

__version__ = "0.3.0"
