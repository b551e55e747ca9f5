"""Proof search for Lambek calculus with a relevant modality, its categorical semantics and tensor evaluation."""
from .formula import Formula, Lexicon, Sequent, format_formula, parse_formula, parse_lexicon, parse_sequent
from .prover import Derivation, SearchBudget, check, derive_phrase, prove

__version__ = '0.1.0'

__all__ = [
    'Derivation', 'Formula', 'Lexicon', 'SearchBudget', 'Sequent', 'check', 'derive_phrase', 'format_formula',
    'parse_formula', 'parse_lexicon', 'parse_sequent', 'prove',
]
