"""Exception hierarchy. Everything raised on purpose derives from GenderBeamError."""

from __future__ import annotations


class GenderBeamError(Exception):
    """Base class for all errors raised by this package."""


class LexiconError(GenderBeamError):
    """Malformed lexicon data or an inconsistent set of entries."""


class PatternError(GenderBeamError):
    """Invalid or duplicate placeholder pattern."""


class PairSetError(GenderBeamError):
    """Reinflection pair set violating closure or well-formedness."""


class LatticeError(GenderBeamError):
    """Invalid lattice structure or unparseable lattice text."""


class DecodeError(GenderBeamError):
    """Beam search failed to produce a complete hypothesis."""


class RerankError(GenderBeamError):
    """Reranking preconditions violated (empty list, mismatched alignments)."""


class FormatError(GenderBeamError):
    """Unparseable interchange file; carries path and line context in the message."""
