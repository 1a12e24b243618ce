"""Dense complex linear algebra: Hermitian bases, spectral decompositions,
matrix exponentials, and CPTP channel machinery.

Everything here is plain double precision on immutable numpy arrays; all
functions are pure, so values can be shared freely across threads.  Exact
rational arithmetic lives with the classical automata, not here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

# Tolerance ledger.  Functions take these as overridable keyword defaults.
TAU_HERM = 1e-12   # Hermiticity: max entry of |H - H^dagger|, relative to scale
TAU_PSD = 1e-10    # eigenvalue floor for positivity checks
TAU_EQ = 1e-9      # scalar equality / cutpoint ambiguity band
TAU_RANK = 1e-8    # relative singular-value cutoff for numerical rank


def as_complex_matrix(a) -> np.ndarray:
    """Coerce input to a finite 2-d complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got array of ndim {m.ndim}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def frozen_array(a, dtype=None) -> np.ndarray:
    """Copy to a read-only array so shared values stay immutable."""
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


def is_hermitian(a, tol: float = TAU_HERM) -> bool:
    m = as_complex_matrix(a)
    if m.shape[0] != m.shape[1]:
        return False
    scale = max(1.0, float(np.abs(m).max(initial=0.0)))
    return float(np.abs(m - m.conj().T).max(initial=0.0)) <= tol * scale


def check_hermitian(a, tol: float = TAU_HERM, what: str = "operator") -> np.ndarray:
    m = as_complex_matrix(a)
    if not is_hermitian(m, tol):
        raise ValueError(f"{what} is not Hermitian within tolerance {tol}")
    return m


def hermitian_basis(q: int) -> list[np.ndarray]:
    """Orthonormal basis of the real space of q x q Hermitian matrices.

    Generalized Gell-Mann family with a deterministic ordering: the scaled
    identity I/sqrt(q) first, then the traceless diagonal operators
    diag(1,..,1,-l,0,..)/sqrt(l(l+1)) for l = 1..q-1, then the symmetric
    pairs (|j><k| + |k><j|)/sqrt(2), then the antisymmetric pairs with +i
    in the (j,k) slot for j < k, both families in lexicographic (j,k)
    order.  Element 0 is the only one with nonzero trace, so elements
    1..q^2-1 double as a basis of the traceless subspace.
    """
    if q < 1:
        raise ValueError("dimension must be a positive integer")
    basis = [np.eye(q, dtype=np.complex128) / np.sqrt(q)]
    for l in range(1, q):
        diag = np.zeros(q, dtype=np.complex128)
        diag[:l] = 1.0
        diag[l] = -float(l)
        basis.append(np.diag(diag) / np.sqrt(l * (l + 1)))
    for j in range(q):
        for k in range(j + 1, q):
            m = np.zeros((q, q), dtype=np.complex128)
            m[j, k] = m[k, j] = 1.0 / np.sqrt(2)
            basis.append(m)
    for j in range(q):
        for k in range(j + 1, q):
            m = np.zeros((q, q), dtype=np.complex128)
            m[j, k] = 1j / np.sqrt(2)
            m[k, j] = -1j / np.sqrt(2)
            basis.append(m)
    return [frozen_array(b) for b in basis]


def hs_inner(a, b) -> float:
    """Hilbert-Schmidt inner product Tr(A^dagger B); real for Hermitian pairs."""
    ma = as_complex_matrix(a)
    mb = as_complex_matrix(b)
    if ma.shape != mb.shape:
        raise ValueError(f"dimension mismatch: {ma.shape} vs {mb.shape}")
    return float(np.sum(ma.conj() * mb).real)


def eigh(h, tol: float = TAU_HERM) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ascending eigenvalues and a unitary whose columns are the
    eigenvectors, so H = V diag(w) V^dagger.
    """
    m = check_hermitian(h, tol, "eigh input")
    vals, vecs = np.linalg.eigh(m)
    return vals, vecs


def expm(a) -> np.ndarray:
    """Matrix exponential of a square complex matrix."""
    m = as_complex_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ValueError("expm requires a square matrix")
    return scipy.linalg.expm(m)


def operator_norm(a) -> float:
    """Largest singular value."""
    m = as_complex_matrix(a)
    if min(m.shape) == 0:
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False)[0])


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """A CPTP map as a finite list of Kraus operators, each dim_out x dim_in.

    Construction verifies trace preservation (sum K^dagger K = I within
    Frobenius 1e-10) and complete positivity (Choi eigenvalues >= -TAU_PSD).
    """

    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        if not self.kraus:
            raise ValueError("a channel needs at least one Kraus operator")
        ops = tuple(frozen_array(as_complex_matrix(k)) for k in self.kraus)
        shape = ops[0].shape
        if any(k.shape != shape for k in ops):
            raise ValueError("all Kraus operators must share one shape")
        object.__setattr__(self, "kraus", ops)
        gram = sum(k.conj().T @ k for k in ops)
        if np.linalg.norm(gram - np.eye(self.dim_in)) > 1e-10:
            raise ValueError("Kraus operators do not sum to a trace-preserving map")
        cmin = float(np.linalg.eigvalsh(choi_matrix(self)).min())
        if cmin < -TAU_PSD:
            raise ValueError(f"channel is not completely positive (Choi eigenvalue {cmin:.3e})")

    @property
    def dim_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.kraus[0].shape[0]

    @staticmethod
    def identity(dim: int) -> "KrausChannel":
        return KrausChannel((np.eye(dim, dtype=np.complex128),))

    @staticmethod
    def from_unitary(u) -> "KrausChannel":
        m = as_complex_matrix(u)
        return KrausChannel((m,))


def apply_channel(channel: KrausChannel, rho) -> np.ndarray:
    """Kraus sum K rho K^dagger.  Linear, so rho may be any operator; on
    density operators the result is again a density operator."""
    m = as_complex_matrix(rho)
    if m.shape != (channel.dim_in, channel.dim_in):
        raise ValueError(
            f"channel expects a {channel.dim_in} x {channel.dim_in} operator, got {m.shape}")
    out = np.zeros((channel.dim_out, channel.dim_out), dtype=np.complex128)
    for k in channel.kraus:
        out += k @ m @ k.conj().T
    return out


def choi_matrix(channel: KrausChannel) -> np.ndarray:
    """Choi operator sum_ij |i><j| (x) Phi(|i><j|); PSD iff Phi is CP.

    Computed as sum_k w_k w_k^dagger with w_k the column stacking of K_k
    against the input basis, which expands to the same double sum.
    """
    din, dout = channel.dim_in, channel.dim_out
    c = np.zeros((din * dout, din * dout), dtype=np.complex128)
    for k in channel.kraus:
        w = np.ascontiguousarray(k.T).reshape(-1)
        c += np.outer(w, w.conj())
    return c


def check_density(rho, tol_psd: float = TAU_PSD, tol_trace: float = 1e-12) -> np.ndarray:
    """Validate a density operator: Hermitian, PSD, unit trace."""
    m = check_hermitian(rho, what="density operator")
    low = float(np.linalg.eigvalsh(m).min())
    if low < -tol_psd:
        raise ValueError(f"density operator has eigenvalue {low:.3e} below -{tol_psd}")
    tr = float(np.trace(m).real)
    if abs(tr - 1.0) > tol_trace:
        raise ValueError(f"density operator has trace {tr!r}, expected 1")
    return m


def check_effect(e, tol: float = TAU_PSD) -> np.ndarray:
    """Validate an effect: Hermitian with spectrum inside [0, 1]."""
    m = check_hermitian(e, what="effect")
    vals = np.linalg.eigvalsh(m)
    if float(vals.min()) < -tol or float(vals.max()) > 1.0 + tol:
        raise ValueError(
            f"effect spectrum [{vals.min():.3e}, {vals.max():.3e}] leaves [0, 1]")
    return m


def check_projector(p, tol: float = 1e-10) -> np.ndarray:
    """Validate a projector: Hermitian with ||P^2 - P||_F <= tol."""
    m = check_hermitian(p, what="projector")
    resid = float(np.linalg.norm(m @ m - m))
    if resid > tol:
        raise ValueError(f"projector residual ||P^2 - P|| = {resid:.3e} exceeds {tol}")
    return m


def is_density(rho) -> bool:
    try:
        check_density(rho)
        return True
    except ValueError:
        return False


def is_effect(e) -> bool:
    try:
        check_effect(e)
        return True
    except ValueError:
        return False


def is_projector(p) -> bool:
    try:
        check_projector(p)
        return True
    except ValueError:
        return False
