"""Milnor invariants of welded links and of surface-links given by cut-diagrams."""

from milnor.engine import chen_series, chen_word, delta_and_mubar, longitudes, mu, mu_table, phi_q
from milnor.gauss import BasedDiagram, apply_move, arc_table, parse_gauss_code
from milnor.series import TruncSeries, magnus_expand
from milnor.words import FreeWord

__all__ = [
    "BasedDiagram",
    "FreeWord",
    "TruncSeries",
    "apply_move",
    "arc_table",
    "chen_series",
    "chen_word",
    "delta_and_mubar",
    "longitudes",
    "magnus_expand",
    "mu",
    "mu_table",
    "parse_gauss_code",
    "phi_q",
]
