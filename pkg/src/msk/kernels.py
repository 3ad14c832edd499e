"""Backend selection for the summation kernels.

The compiled extension is used when it imports; ``MSK_BACKEND=python``
forces the numpy fallback.
"""
import os

from . import _pykernels as python

try:
    from . import _ckernels as compiled
except ImportError:  # extension not built
    compiled = None

if compiled is not None and os.environ.get("MSK_BACKEND", "").lower() != "python":
    backend = compiled
    BACKEND = "cython"
else:
    backend = python
    BACKEND = "python"

# term functions are only ever needed vectorised
atom_mass = python.atom_mass
phi_values = python.phi_values
poisson_terms = python.poisson_terms
chord_phi_terms = python.chord_phi_terms
cv_terms = python.cv_terms
fbeta_terms = python.fbeta_terms
