"""Dense real-matrix utilities the rest of the engine is built on.

All quadrature-space matrices in this package use the stacked ordering
(x_1 .. x_k, y_1 .. y_k).  Invertibility is gated numerically: a block whose
reciprocal condition number falls below ``RCOND_LIMIT`` is treated as
singular, since the analytic solutions it feeds are meaningless there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotPositiveDefinite, SingularBlock

#: Reciprocal-condition-number gate below which a pivot counts as singular.
RCOND_LIMIT = 1e-12


def as_real_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a 2-D float array with finite entries.

    Args:
        a: array-like input.
        name: label used in error messages.

    Returns:
        A C-contiguous ``float64`` copy of the input.

    Raises:
        DimensionMismatch: if the input is not 2-D with positive dimensions,
            or contains non-finite entries.
    """
    arr = np.array(a, dtype=float, copy=True)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionMismatch(f"{name} must be a 2-D matrix with positive dimensions, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DimensionMismatch(f"{name} contains non-finite entries")
    return arr


def rcond(a: np.ndarray) -> float:
    """Reciprocal condition number from singular values (1.0 for empty input)."""
    if a.size == 0:
        return 1.0
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0:
        return 0.0
    return float(s[-1] / s[0])


def invert_checked(a: np.ndarray, what: str = "block") -> np.ndarray:
    """Invert a square matrix, raising ``SingularBlock`` below the rcond gate.

    Zero-size matrices invert to themselves so that degenerate partitions
    (no measured-extra nodes) flow through the blockwise formulas unchanged.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{what} must be square, got shape {a.shape}")
    if a.shape[0] == 0:
        return np.zeros((0, 0))
    if rcond(a) < RCOND_LIMIT:
        raise SingularBlock(f"{what} is numerically singular (rcond below {RCOND_LIMIT:g})")
    return np.linalg.solve(a, np.eye(a.shape[0]))


@dataclass(frozen=True)
class BlockPartition2x2:
    """A 2x2 block partition [[q, t], [c, d]] of a square matrix.

    ``q`` is k x k, ``d`` is j x j, and the off-diagonal blocks are shaped so
    the four blocks compose into a (k+j) x (k+j) matrix.
    """

    q: np.ndarray
    t: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        q, t, c, d = (np.asarray(b, dtype=float) for b in (self.q, self.t, self.c, self.d))
        k = q.shape[0]
        j = d.shape[0]
        if q.shape != (k, k) or d.shape != (j, j) or t.shape != (k, j) or c.shape != (j, k):
            raise DimensionMismatch(
                f"blocks do not compose: q{q.shape}, t{t.shape}, c{c.shape}, d{d.shape}"
            )
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    def compose(self) -> np.ndarray:
        """Assemble the full (k+j) x (k+j) matrix."""
        return np.block([[self.q, self.t], [self.c, self.d]])


def blockwise_invert_upper(b: BlockPartition2x2) -> np.ndarray:
    """Invert ``[[q, t], [c, d]]`` by pivoting on the upper-left block.

    Uses the Schur complement ``h = d - c q^{-1} t`` of the pivot.

    Raises:
        SingularBlock: if ``q`` or the Schur complement is numerically
            singular.  For the measurement systems built on top of this, that
            signals the chosen solution variant does not apply at these
            angles.
    """
    q_inv = invert_checked(b.q, "pivot block q")
    h = b.d - b.c @ q_inv @ b.t
    h_inv = invert_checked(h, "Schur complement h = d - c q^-1 t")
    top_left = q_inv + q_inv @ b.t @ h_inv @ b.c @ q_inv
    return np.block(
        [
            [top_left, -q_inv @ b.t @ h_inv],
            [-h_inv @ b.c @ q_inv, h_inv],
        ]
    )


def blockwise_invert_lower(b: BlockPartition2x2) -> np.ndarray:
    """Invert ``[[q, t], [c, d]]`` by pivoting on the lower-right block.

    Uses the Schur complement ``pi = q - t d^{-1} c`` of the pivot.

    Raises:
        SingularBlock: if ``d`` or the Schur complement is numerically
            singular.
    """
    d_inv = invert_checked(b.d, "pivot block d")
    pi = b.q - b.t @ d_inv @ b.c
    pi_inv = invert_checked(pi, "Schur complement pi = q - t d^-1 c")
    bottom_right = d_inv + d_inv @ b.c @ pi_inv @ b.t @ d_inv
    return np.block(
        [
            [pi_inv, -pi_inv @ b.t @ d_inv],
            [-d_inv @ b.c @ pi_inv, bottom_right],
        ]
    )


def symplectic_form(k: int) -> np.ndarray:
    """The form J = [[0, I_k], [-I_k, 0]] in (x..., y...) ordering."""
    j = np.zeros((2 * k, 2 * k))
    j[:k, k:] = np.eye(k)
    j[k:, :k] = -np.eye(k)
    return j


def symplectic_defect(m: np.ndarray) -> float:
    """Max-abs residual of the canonical-commutator condition M J M^T = J.

    Returns 0 for exactly symplectic input; the size of the defect otherwise.

    Raises:
        DimensionMismatch: for non-square or odd-dimensional input.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] % 2 != 0:
        raise DimensionMismatch(f"quadrature dimension must be even, got {m.shape[0]}")
    j = symplectic_form(m.shape[0] // 2)
    return float(np.max(np.abs(m @ j @ m.T - j))) if m.size else 0.0


def inv_sqrt_posdef(a: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Symmetric inverse square root of a symmetric positive-definite matrix.

    Returns ``b`` with ``b @ b = inv(a)``, computed from the symmetric
    eigendecomposition (certified-accuracy route for the small matrices the
    engine handles).

    Raises:
        NotPositiveDefinite: if ``a`` is not symmetric, or has an eigenvalue
            at or below ``tol`` (relative to the largest eigenvalue).
    """
    a = as_real_matrix(a, "matrix")
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if not np.allclose(a, a.T, atol=1e-10, rtol=0.0):
        raise NotPositiveDefinite("matrix is not symmetric")
    vals, vecs = np.linalg.eigh((a + a.T) / 2.0)
    if vals[0] <= tol * max(1.0, float(vals[-1])):
        raise NotPositiveDefinite(f"eigenvalue {vals[0]:g} at or below tolerance")
    b = (vecs / np.sqrt(vals)) @ vecs.T
    return (b + b.T) / 2.0
