"""Multiplicities of symmetric pairs of finite groups, with the character
tables, twisted cohomology and Clifford-theory checks they rest on."""
from .catalog import build, parse_group_spec, standard_involutions
from .chartab import Character, CharacterTable, character_table
from .cohomology import h1_kernel, h1_s2, h2_fp_dimension
from .config import Caps, get_caps, set_caps
from .errors import SympairError, VerificationError
from .groups import (Automorphism, FiniteGroup, Subgroup, find_involutive_automorphisms,
                     p_radical, sylow_subgroup)
from .pairs import SymmetricPair, mu, nu

__version__ = "0.1.0"

__all__ = [
    "Automorphism", "Caps", "Character", "CharacterTable", "FiniteGroup", "Subgroup",
    "SymmetricPair", "SympairError", "VerificationError", "build", "character_table",
    "find_involutive_automorphisms", "get_caps", "h1_kernel", "h1_s2", "h2_fp_dimension",
    "mu", "nu", "p_radical", "parse_group_spec", "set_caps", "standard_involutions",
    "sylow_subgroup",
]
