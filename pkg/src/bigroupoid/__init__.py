"""Executable model structure on finite bigroupoids."""
from .core import (
    ClassError,
    CompositionError,
    ConeError,
    ConstructionError,
    FiniteBigroupoid,
    FiniteGroupoid,
    GroupoidFunctor,
    Icon,
    NatIso,
    PreconditionError,
    Pseudofunctor,
    StructuralError,
    ValidationReport,
    compose_pseudofunctors,
    product_and_diagonal,
    terminal_and_bang,
    validate_bigroupoid,
    validate_icon,
    validate_pseudofunctor,
)

__version__ = "0.1.0"
