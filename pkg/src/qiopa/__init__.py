"""Phase-space and decoherence toolkit for optically amplified macrostates.

The package covers single-photon-seeded parametric amplifiers (collinear and
non-collinear), coherent-state superpositions, photon loss, Wigner functions
and Bures-distance metrology.  Conventions used throughout:

* phase-space point ``alpha = X + iY``; vacuum ``W = (2/pi) exp(-2|alpha|^2)``;
  every Wigner function integrates to one;
* loss is a beam splitter with reflectivity ``R`` and transmittivity
  ``T = 1 - R``.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    ConfigError,
    DegenerateFilterError,
    InvalidStateError,
    NumericalError,
    TruncationError,
    UnsupportedInputError,
)
