"""ctw_sp: exact connected treewidth for treewidth-2 graphs."""

from importlib.metadata import version, PackageNotFoundError

try:
    __version__ = version("ctw_sp")
except PackageNotFoundError:
    __version__ = "0.1.0b1"
