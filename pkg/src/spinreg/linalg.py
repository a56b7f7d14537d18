"""Dense complex linear algebra for small spin Hilbert spaces.

Everything here operates on plain ``numpy`` arrays of complex numbers.
Dimensions are powers of two (one electron qubit plus up to six nuclear
spins-1/2), so dense eigendecomposition-based methods are both exact and
fast; no sparse formats are used.
"""

from __future__ import annotations

import numpy as np

# Central tolerances used by validation helpers and tests.
UNITARY_TOL = 1e-10
HERMITIAN_TOL = 1e-12

# Pauli matrices and friends.
ID2 = np.eye(2, dtype=complex)
SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)

# Electron manifold projectors: |0> = ms=0 (index 0), |1> = ms=1 (index 1).
P0 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
P1 = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)


class LinalgError(ValueError):
    """Raised when a matrix fails a structural precondition."""


def max_abs(a) -> float:
    """Largest absolute entry of an array (the max-norm used in tolerances)."""
    a = np.asarray(a)
    return 0.0 if a.size == 0 else float(np.max(np.abs(a)))


def is_hermitian(h, tol: float = HERMITIAN_TOL) -> bool:
    h = np.asarray(h, dtype=complex)
    return max_abs(h - h.conj().T) <= tol


def is_unitary(u, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u, dtype=complex)
    return max_abs(u.conj().T @ u - np.eye(u.shape[0])) <= tol


def kron(a, b):
    """Tensor (Kronecker) product, entry ((i*db+k),(j*db+l)) = a[i,j]*b[k,l]."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def kron_all(ops):
    """Tensor product of a sequence of matrices, leftmost factor first."""
    out = np.eye(1, dtype=complex)
    for op in ops:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def embed_operator(op, site: int, n_sites: int):
    """Embed a single-qubit operator at ``site`` in an ``n_sites`` register.

    Site 0 is the leftmost (most significant) tensor factor.
    """
    op = np.asarray(op, dtype=complex)
    if op.shape != (2, 2):
        raise LinalgError(f"embedded operator must be 2x2, got {op.shape}")
    if not 0 <= site < n_sites:
        raise LinalgError(f"site {site} out of range for {n_sites} sites")
    left = np.eye(2**site, dtype=complex)
    right = np.eye(2 ** (n_sites - site - 1), dtype=complex)
    return np.kron(np.kron(left, op), right)


def expm_hermitian(h, t: float):
    """exp(-i h t) for Hermitian h via eigendecomposition (any real t)."""
    h = np.asarray(h, dtype=complex)
    w, v = np.linalg.eigh(h)
    phases = np.exp(-1j * w * t)
    return (v * phases) @ v.conj().T


def evolve(h, t: float):
    """Propagator exp(-i h t) of a Hermitian generator over duration t >= 0.

    Raises ``LinalgError`` if ``h`` is not Hermitian within tolerance or if
    t is negative.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise LinalgError(f"generator must be square, got shape {h.shape}")
    if not is_hermitian(h):
        raise LinalgError("generator is not Hermitian within tolerance")
    if t < 0:
        raise LinalgError(f"duration must be nonnegative, got {t}")
    return expm_hermitian(h, t)


def gate_fidelity(u_target, u_actual) -> float:
    """Global-phase-insensitive gate fidelity |Tr(U_target^dag U)/d|^2."""
    u_target = np.asarray(u_target, dtype=complex)
    u_actual = np.asarray(u_actual, dtype=complex)
    if u_target.shape != u_actual.shape:
        raise LinalgError(
            f"dimension mismatch: {u_target.shape} vs {u_actual.shape}"
        )
    d = u_target.shape[0]
    overlap = np.trace(u_target.conj().T @ u_actual) / d
    return float(abs(overlap) ** 2)


def matrix_product(mats):
    """Time-ordered product of a list of propagators (first element acts first).

    Uses pairwise (log-depth) reduction so long products of small matrices
    vectorize well.
    """
    mats = list(mats)
    if not mats:
        raise LinalgError("empty product")
    stack = np.array(mats[::-1])  # latest operator leftmost
    while stack.shape[0] > 1:
        n = stack.shape[0]
        if n % 2 == 1:
            head, stack = stack[:1], stack[1:]
            n -= 1
        else:
            head = None
        stack = np.matmul(stack[0::2], stack[1::2])
        if head is not None:
            stack = np.concatenate([head, stack], axis=0)
    return stack[0]


def rot_z(theta: float):
    """e^{-i theta sigma_z / 2}."""
    return np.array(
        [[np.exp(-0.5j * theta), 0.0], [0.0, np.exp(0.5j * theta)]],
        dtype=complex,
    )


def rot_x(theta: float):
    """e^{-i theta sigma_x / 2}."""
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def rot_y(theta: float):
    """e^{-i theta sigma_y / 2}."""
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rot_axis(nx: float, ny: float, nz: float, theta: float):
    """e^{-i theta (n . sigma) / 2} for a unit axis n."""
    n = np.array([nx, ny, nz], dtype=float)
    norm = np.linalg.norm(n)
    if norm == 0.0:
        raise LinalgError("rotation axis must be nonzero")
    n = n / norm
    gen = n[0] * SX + n[1] * SY + n[2] * SZ
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return c * ID2 - 1j * s * gen
