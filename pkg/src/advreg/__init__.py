"""advreg: conditional GANs as samplers of regression predictive distributions."""

from importlib import metadata

try:
    __version__ = metadata.version("advreg")
except metadata.PackageNotFoundError:  # pragma: no cover
    # package is not installed
    __version__ = "0.0.0"
