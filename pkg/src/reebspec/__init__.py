"""Exact Reeb action spectra, filtered homology and closing-gap diagnostics for ellipsoids."""

from .exact import Exact, FieldMismatchError, parse_exact
from .spectrum import EllipsoidParams, spec_plus
from .selectors import SelectorFamily, ECH_LATTICE, CH_LATTICE

__all__ = ["Exact", "FieldMismatchError", "parse_exact", "EllipsoidParams", "spec_plus",
           "SelectorFamily", "ECH_LATTICE", "CH_LATTICE"]
__version__ = "0.1.0"
