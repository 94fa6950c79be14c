"""Exact computations with beaded diagrams over the localized free group ring."""
from .diagrams import Diagram, DiagramSum, RawDiagram, exp_union, hair, strut, tripod, wheel
from .freegroup import GroupRingElement
from .gaussian import ClasperSpec, Integrand, complete_contraction, decompose, integrate
from .helement import HElement, chi_h, eta, phi_conj
from .localization import Core, LocElement, herm_invert, loc_equal
from .series import CyclicSeries, NCSeries

__all__ = [
    "ClasperSpec",
    "Core",
    "CyclicSeries",
    "Diagram",
    "DiagramSum",
    "GroupRingElement",
    "HElement",
    "Integrand",
    "LocElement",
    "NCSeries",
    "RawDiagram",
    "chi_h",
    "complete_contraction",
    "decompose",
    "eta",
    "exp_union",
    "hair",
    "herm_invert",
    "integrate",
    "loc_equal",
    "phi_conj",
    "strut",
    "tripod",
    "wheel",
]
