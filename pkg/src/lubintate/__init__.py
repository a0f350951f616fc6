"""Exact arithmetic for Artin-Schreier reductions of Lubin-Tate affinoids."""

from .ffield import FieldError, FiniteField, FqElem, ParamError, ParamSet, Tower, init_tower

__all__ = ["FieldError", "FiniteField", "FqElem", "ParamError", "ParamSet", "Tower", "init_tower"]
__version__ = "0.1.0"
