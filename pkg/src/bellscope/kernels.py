"""Select the compiled kernels when the extension is built, else numpy.

``BACKEND`` is ``"compiled"`` or ``"python"``.  The compiled Bell kernels
are plain loops; above ``BLAS_CROSSOVER`` the BLAS-backed numpy versions
are faster (see benchmarks/bench_kernels.py), so large d is routed there.
"""
from . import _kernels_py

BLAS_CROSSOVER = 20

try:
    from . import _kernels as _compiled
    BACKEND = "compiled"
except ImportError:  # extension not built
    _compiled = None
    BACKEND = "python"

if _compiled is None:
    bell_value = _kernels_py.bell_value
    bell_value_grad = _kernels_py.bell_value_grad
    givens_unitary = _kernels_py.givens_unitary
else:
    givens_unitary = _compiled.givens_unitary

    def bell_value(U, lam, K):
        impl = _compiled if lam.shape[0] <= BLAS_CROSSOVER else _kernels_py
        return impl.bell_value(U, lam, K)

    def bell_value_grad(U, lam, K):
        impl = _compiled if lam.shape[0] <= BLAS_CROSSOVER else _kernels_py
        return impl.bell_value_grad(U, lam, K)

__all__ = ["BACKEND", "BLAS_CROSSOVER", "bell_value", "bell_value_grad", "givens_unitary"]
