"""Hermitian linear algebra kernel.

Eigendecomposition, symmetric and right logarithmic derivative solves,
Moore-Penrose inverse and the spectral absolute trace.  All routines work on
plain complex ``numpy`` arrays; nothing here keeps state between calls.
"""

import numpy as np

from .exceptions import InvalidInputError, SingularSupportError

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
NEGATIVITY_TOL = 1e-10
SUPPORT_TOL = 1e-12
LEAK_TOL = 1e-9

__all__ = [
    "HERMITIAN_TOL",
    "LEAK_TOL",
    "NEGATIVITY_TOL",
    "SUPPORT_TOL",
    "TRACE_TOL",
    "SupportedState",
    "as_density_matrix",
    "as_hermitian",
    "clip_density_matrix",
    "eig_hermitian",
    "pinv",
    "pinv_rank",
    "solve_rld",
    "solve_sld",
    "spabs",
]


def _square(M, name="matrix"):
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise InvalidInputError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return M


def as_hermitian(H, tol=HERMITIAN_TOL, name="matrix"):
    """Return ``H`` as a complex array after checking it is Hermitian.

    The check is relative: ``max|H - H^dagger| <= tol * max(1, max|H|)``.
    The returned array is exactly Hermitian (symmetrized).
    """
    H = _square(H, name)
    scale = max(1.0, float(np.max(np.abs(H))))
    if np.max(np.abs(H - H.conj().T)) > tol * scale:
        raise InvalidInputError(f"{name} is not Hermitian within {tol:g}")
    return 0.5 * (H + H.conj().T)


def eig_hermitian(H, tol=HERMITIAN_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns
    -------
    w : ndarray
        Real eigenvalues in ascending order.
    U : ndarray
        Unitary matrix whose columns are the matching eigenvectors, so that
        ``H = U @ diag(w) @ U^dagger``.
    """
    H = as_hermitian(H, tol)
    off = H - np.diag(np.diag(H))
    if not np.any(off):
        # exact for diagonal input, and much cheaper for large thermal states
        d = np.diag(H).real
        order = np.argsort(d, kind="stable")
        return d[order], np.eye(H.shape[0], dtype=complex)[:, order]
    w, U = np.linalg.eigh(H)
    return w, U


def as_density_matrix(rho, trace_tol=TRACE_TOL, negativity_tol=NEGATIVITY_TOL,
                      hermitian_tol=HERMITIAN_TOL):
    """Validate a density matrix: Hermitian, unit trace, no negative eigenvalues."""
    rho = as_hermitian(rho, hermitian_tol, "density matrix")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_tol:
        raise InvalidInputError(f"density matrix has trace {tr!r}, expected 1")
    w = np.linalg.eigvalsh(rho)
    if w[0] < -negativity_tol:
        raise InvalidInputError(f"density matrix has eigenvalue {w[0]:.3e} below zero")
    return rho


def clip_density_matrix(rho, negativity_tol=NEGATIVITY_TOL, hermitian_tol=HERMITIAN_TOL):
    """Repair a density matrix read from a file.

    Negative eigenvalues no lower than ``-negativity_tol`` are set to zero and
    the trace is renormalized.  Anything more negative is an error.
    """
    w, U = eig_hermitian(rho, hermitian_tol)
    if w[0] < -negativity_tol:
        raise InvalidInputError(f"density matrix has eigenvalue {w[0]:.3e} below zero")
    w = np.clip(w, 0.0, None)
    if w.sum() <= 0:
        raise InvalidInputError("density matrix has zero trace")
    out = (U * (w / w.sum())) @ U.conj().T
    return 0.5 * (out + out.conj().T)


class SupportedState:
    """A density matrix restricted to the span of its non-negligible eigenvectors.

    The eigendecomposition is computed once, so several logarithmic
    derivatives and Gram matrices can be formed against the same state.
    Operators are handled in the support eigenbasis ("reduced" form) and
    mapped back with :meth:`lift`.
    """

    def __init__(self, rho, support_tol=SUPPORT_TOL, leak_tol=LEAK_TOL):
        rho = as_hermitian(rho, name="density matrix")
        diagonal = not np.any(rho - np.diag(np.diag(rho)))
        w, U = eig_hermitian(rho)
        keep = w > support_tol
        if not np.any(keep):
            raise SingularSupportError("state has no eigenvalue above the support tolerance")
        self.dim = len(w)
        self.eigenvalues = w[keep]
        self.basis = U[:, keep]
        # for diagonal states the basis is a column selection; index instead of multiplying
        self._index = np.argmax(np.abs(self.basis), axis=0) if diagonal else None
        self.support_tol = support_tol
        self.leak_tol = leak_tol

    @property
    def rank(self):
        return len(self.eigenvalues)

    def reduce(self, D, name="operator"):
        """Express ``D`` in the support eigenbasis, checking it does not leak out."""
        D = _square(D, name)
        if D.shape[0] != self.dim:
            raise InvalidInputError(f"{name} has dimension {D.shape[0]}, state has {self.dim}")
        if self._index is not None:
            Dt = D[np.ix_(self._index, self._index)]
        else:
            Dt = self.basis.conj().T @ D @ self.basis
        if self.rank < self.dim:
            if self._index is not None:
                outside = D.copy()
                outside[np.ix_(self._index, self._index)] = 0.0
                leak = np.linalg.norm(outside)
            else:
                leak = np.linalg.norm(D - self.basis @ Dt @ self.basis.conj().T)
            if leak > self.leak_tol * max(1.0, np.linalg.norm(D)):
                raise SingularSupportError(
                    f"{name} has weight {leak:.3e} outside the support of the state")
        return Dt

    def lift(self, Xt):
        if self._index is not None:
            out = np.zeros((self.dim, self.dim), dtype=complex)
            out[np.ix_(self._index, self._index)] = Xt
            return out
        return self.basis @ Xt @ self.basis.conj().T

    def sld_reduced(self, Dt):
        lam = self.eigenvalues
        return 2.0 * Dt / (lam[:, None] + lam[None, :])

    def rld_reduced(self, Dt):
        return Dt / self.eigenvalues[:, None]

    def inverse_reduced(self):
        return np.diag(1.0 / self.eigenvalues)

    def sld(self, D):
        L = self.lift(self.sld_reduced(self.reduce(D)))
        return 0.5 * (L + L.conj().T)

    def rld(self, D):
        return self.lift(self.rld_reduced(self.reduce(D)))

    def sld_gram(self, Lts):
        """Real Gram matrix ``(1/2) Tr rho {L_i, L_j}`` of reduced Hermitian operators."""
        lam = self.eigenvalues
        n = len(Lts)
        K = np.empty((n, n))
        for i in range(n):
            for j in range(i, n):
                K[i, j] = K[j, i] = np.real(np.sum(lam[:, None] * Lts[i] * Lts[j].T))
        return K

    def rld_gram(self, Lts):
        """Hermitian Gram matrix with entries ``Tr rho L_j L_i^dagger``."""
        lam = self.eigenvalues
        n = len(Lts)
        K = np.empty((n, n), dtype=complex)
        for i in range(n):
            for j in range(i, n):
                K[i, j] = np.sum(lam[:, None] * Lts[j] * Lts[i].conj())
                K[j, i] = np.conj(K[i, j])
        for i in range(n):
            K[i, i] = K[i, i].real
        return K


def solve_sld(rho, D, support_tol=SUPPORT_TOL, leak_tol=LEAK_TOL):
    """Hermitian ``L`` with ``(rho L + L rho) / 2 = D`` on the support of ``rho``.

    Solved in the eigenbasis of ``rho`` via ``L_ij = 2 D_ij / (l_i + l_j)``.
    ``L`` vanishes outside the support.  Raises
    :class:`~qbound.exceptions.SingularSupportError` if ``D`` has weight
    outside the support.
    """
    state = SupportedState(rho, support_tol, leak_tol)
    return state.sld(as_hermitian(D, name="D"))


def solve_rld(rho, D, support_tol=SUPPORT_TOL, leak_tol=LEAK_TOL):
    """``L`` with ``rho L = D`` on the support of ``rho`` (``L = rho^-1 D`` there)."""
    state = SupportedState(rho, support_tol, leak_tol)
    return state.rld(as_hermitian(D, name="D"))


def pinv_rank(M, tol=1e-12):
    """Moore-Penrose inverse and numerical rank.

    Singular values at or below ``tol`` times the largest one are treated as
    zero.
    """
    M = np.asarray(M)
    if M.size == 0:
        return M.conj().T.copy(), 0
    U, s, Vh = np.linalg.svd(M)
    if s.size == 0 or s[0] == 0:
        return np.zeros(M.shape[::-1], dtype=M.dtype), 0
    keep = s > tol * s[0]
    inv = (Vh[keep].conj().T / s[keep]) @ U[:, keep].conj().T
    if not np.iscomplexobj(M):
        inv = inv.real
    return inv, int(keep.sum())


def pinv(M, tol=1e-12):
    """Moore-Penrose pseudo-inverse with relative singular value cutoff ``tol``."""
    if tol < 0:
        raise InvalidInputError("tol must be non-negative")
    return pinv_rank(M, tol)[0]


def spabs(M):
    """Sum of the absolute values of the eigenvalues of a square matrix."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.sum(np.abs(np.linalg.eigvals(M))))
