"""Elementary symplectic building blocks and 2x2 factorization machinery.

Matrices act on stacked quadrature vectors (x_1..x_m, y_1..y_m).  The
constructors cover the gate set the measurement engine composes its analytic
solutions from: the entangling gate ``cz_of``, multimode squeezing and
rotations, and the symmetric-angle map ``phi_of`` produced by measuring both
beam-splitter ports of an input.  ``euler_decompose`` provides the single-mode
rotation-squeeze-rotation factorization used to state universality, and
``four_node_angles_for`` inverts the five four-node measurement families in
closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DecompositionFailure,
    DegenerateAngles,
    DimensionMismatch,
    InvalidWeight,
    OutOfBranch,
)
from .matrix_core import symplectic_defect

#: Constructors certify their output against this defect bound.
SYMPLECTIC_TOL = 1e-9


@dataclass(frozen=True)
class SymplecticTransform:
    """A real quadrature transformation with its symplectic-defect certificate."""

    matrix: np.ndarray
    defect: float = None  # type: ignore[assignment]

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float, copy=True)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "defect", symplectic_defect(m))

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def __matmul__(self, other: "SymplecticTransform") -> "SymplecticTransform":
        return SymplecticTransform(self.matrix @ other.matrix)


def _angle_vector(theta, m: int | None, name: str) -> np.ndarray:
    vec = np.atleast_1d(np.asarray(theta, dtype=float))
    if vec.ndim != 1:
        raise DimensionMismatch(f"{name} must be a scalar or 1-D vector")
    if m is not None and vec.size == 1 and m > 1:
        vec = np.full(m, vec[0])
    if m is not None and vec.size != m:
        raise DimensionMismatch(f"{name} must have {m} entries, got {vec.size}")
    if not np.all(np.isfinite(vec)):
        raise DimensionMismatch(f"{name} contains non-finite entries")
    return vec


def cz_of(w) -> SymplecticTransform:
    """Entangling gate [[I, 0], [W, I]] for a symmetric zero-diagonal weight W.

    Raises:
        InvalidWeight: if W is not square symmetric with zero diagonal.
    """
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise InvalidWeight(f"weight matrix must be square, got shape {w.shape}")
    if not np.allclose(w, w.T, atol=1e-12, rtol=0.0):
        raise InvalidWeight("weight matrix must be symmetric")
    if np.any(np.abs(np.diag(w)) > 0.0):
        raise InvalidWeight("weight matrix must have a zero main diagonal")
    m = w.shape[0]
    mat = np.eye(2 * m)
    mat[m:, :m] = w
    return SymplecticTransform(mat)


def squeeze_of(r, m: int | None = None) -> SymplecticTransform:
    """Multimode squeezer diag(e^{-r}, e^{r}) acting on (x..., y...)."""
    vec = _angle_vector(r, m, "squeeze parameter")
    return SymplecticTransform(np.diag(np.concatenate([np.exp(-vec), np.exp(vec)])))


def rotate_of(theta, m: int | None = None) -> SymplecticTransform:
    """Multimode phase rotation [[cos, -sin], [sin, cos]] with diagonal angle blocks."""
    vec = _angle_vector(theta, m, "rotation angle")
    c, s = np.cos(vec), np.sin(vec)
    return SymplecticTransform(np.block([[np.diag(c), np.diag(-s)], [np.diag(s), np.diag(c)]]))


def phi_of(theta_plus, theta_minus) -> SymplecticTransform:
    """Symmetric-angle transformation produced by measuring both mixing ports.

    In terms of the per-mode sum and difference angles it reads

        [[cos(t-) + cos(t+),  sin(t+)        ],
         [-sin(t+),           cos(t+) - cos(t-)]] * csc(t-)

    blockwise, and coincides with R(-t+/2) S(ln tan(t-/2)) R(-t+/2) wherever
    the logarithm is defined.

    Raises:
        DegenerateAngles: when any difference angle has |sin| below 1e-12
            (the squeeze factor would diverge).
    """
    tp = _angle_vector(theta_plus, None, "theta_plus")
    tm = _angle_vector(theta_minus, tp.size, "theta_minus")
    if tp.size != tm.size:
        raise DimensionMismatch("theta_plus and theta_minus must have equal length")
    s_minus = np.sin(tm)
    if np.any(np.abs(s_minus) < 1e-12):
        raise DegenerateAngles("sin of a difference angle vanishes; squeeze factor diverges")
    csc = 1.0 / s_minus
    cp, cm, sp = np.cos(tp), np.cos(tm), np.sin(tp)
    return SymplecticTransform(
        np.block(
            [
                [np.diag((cm + cp) * csc), np.diag(sp * csc)],
                [np.diag(-sp * csc), np.diag((cp - cm) * csc)],
            ]
        )
    )


@dataclass(frozen=True)
class EulerFactors:
    """Rotation-squeeze-rotation factors of a 2x2 symplectic matrix.

    The reconstruction convention is ``R(phi1) @ S(r) @ R(phi2)`` with the
    canonical branch r >= 0, angles in (-pi, pi], and phi2 = 0 whenever the
    squeeze vanishes (only phi1 + phi2 is determined there).
    """

    phi1: float
    r: float
    phi2: float

    def to_matrix(self) -> np.ndarray:
        return (rotate_of(self.phi1, 1) @ squeeze_of(self.r, 1) @ rotate_of(self.phi2, 1)).matrix


def _wrap_angle(theta: float) -> float:
    """Wrap into (-pi, pi]."""
    wrapped = math.remainder(theta, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


def euler_decompose(m) -> EulerFactors:
    """Factor a 2x2 symplectic matrix as R(phi1) S(r) R(phi2).

    The factor angles are read off the symmetric eigendecomposition of
    ``M M^T = R(phi1) S(2r) R(phi1)^T``.

    Raises:
        DecompositionFailure: if the input is not 2x2 symplectic.
    """
    mat = m.matrix if isinstance(m, SymplecticTransform) else np.asarray(m, dtype=float)
    if mat.shape != (2, 2):
        raise DecompositionFailure(f"expected a 2x2 matrix, got shape {mat.shape}")
    if symplectic_defect(mat) > 1e-8:
        raise DecompositionFailure("matrix is not symplectic (unit-determinant) within tolerance")

    gram = mat @ mat.T
    vals, vecs = np.linalg.eigh((gram + gram.T) / 2.0)
    # vals = (e^{-2r}, e^{2r}) with the columns of vecs the rotation R(phi1)
    r = 0.5 * math.log(float(vals[1]))
    if r < 1e-12:
        phi1 = math.atan2(mat[1, 0], mat[0, 0])
        return EulerFactors(phi1=_wrap_angle(phi1), r=0.0, phi2=0.0)
    rot1 = vecs.copy()
    if np.linalg.det(rot1) < 0:
        rot1[:, 1] = -rot1[:, 1]
    phi1 = math.atan2(rot1[1, 0], rot1[0, 0])
    rest = np.diag([math.exp(r), math.exp(-r)]) @ rot1.T @ mat
    phi2 = math.atan2(rest[1, 0], rest[0, 0])
    factors = EulerFactors(phi1=_wrap_angle(phi1), r=r, phi2=_wrap_angle(phi2))
    if np.max(np.abs(factors.to_matrix() - mat)) > 1e-9 * max(1.0, float(np.max(np.abs(mat)))):
        raise DecompositionFailure("factor reconstruction failed; input is too far from symplectic")
    return factors


@dataclass(frozen=True)
class FourNodeAngles:
    """Measurement angles driving one of the five four-node families.

    ``theta3``/``theta4`` are the homodyne phases of the two measured-only
    nodes; ``theta_plus``/``theta_minus`` the sum and difference of the two
    beam-splitter port phases.
    """

    theta3: float
    theta4: float
    theta_plus: float
    theta_minus: float

    def __post_init__(self):
        if abs(math.sin(self.theta_minus)) < 1e-12:
            raise DegenerateAngles("difference angle must not be a multiple of pi")


#: Quarter-turn bookkeeping of the closed-form decomposition: the left factor
#: of family j carries an extra R(-pi/2) for j in {2, 4}, the right factor for
#: j in {1, 4}.
_LEFT_TURN = {1: 0, 2: 1, 3: 0, 4: 1, 5: 0}
_RIGHT_TURN = {1: 1, 2: 0, 3: 0, 4: 1, 5: 0}

CONFIG_IDS = (1, 2, 3, 4, 5)


def template_transform(config_id: int, theta3: float, theta4: float, theta_plus: float, theta_minus: float) -> SymplecticTransform:
    """Main transformation matrix of four-node family ``config_id`` (1..5).

    Raises:
        DegenerateAngles: when a tan/cot entry of the requested family or the
            squeeze factor diverges at these angles.
    """
    if config_id not in CONFIG_IDS:
        raise DimensionMismatch(f"config_id must be in 1..5, got {config_id}")
    t3, t4 = float(theta3), float(theta4)

    def tan(x: float) -> float:
        if abs(math.cos(x)) < 1e-12:
            raise DegenerateAngles("tan diverges at this node angle")
        return math.tan(x)

    def cot(x: float) -> float:
        if abs(math.sin(x)) < 1e-12:
            raise DegenerateAngles("cot diverges at this node angle")
        return 1.0 / math.tan(x)

    if config_id == 1:
        core = np.array([[cot(t4) * tan(t3) - 1.0, cot(t4)], [-tan(t3), -1.0]])
        left, right = core @ rotate_of(-math.pi / 2, 1).matrix, None
    elif config_id == 2:
        core = np.array([[cot(t3) * tan(t4) - 1.0, tan(t4)], [-cot(t3), -1.0]])
        left, right = rotate_of(-math.pi / 2, 1).matrix @ core, None
    elif config_id == 3:
        core = np.array([[cot(t4) * cot(t3) - 1.0, cot(t4)], [-cot(t3), -1.0]])
        left, right = core, None
    elif config_id == 4:
        core = np.array([[tan(t3) * tan(t4) - 1.0, tan(t4)], [-tan(t3), -1.0]])
        quarter = rotate_of(-math.pi / 2, 1).matrix
        left, right = quarter @ core @ quarter, None
    else:
        core = np.array([[tan(t3) * tan(t4) - 1.0, tan(t4)], [-tan(t3), -1.0]])
        left, right = core, None
    phi = phi_of(theta_plus, theta_minus).matrix
    return SymplecticTransform(left @ phi if right is None else left @ right @ phi)


def _arccot(v: float) -> float:
    """Inverse cotangent with range (0, pi)."""
    return math.pi / 2.0 - math.atan(v)


def four_node_angles_for(config_id: int, phi1: float, r: float) -> tuple[FourNodeAngles, float]:
    """Closed-form node angles realizing R(phi1) S(r) R(...) on family ``config_id``.

    Returns ``(angles, phi2)`` such that, with the difference angle pinned at
    pi/2 and ``l``/``p`` the family's quarter-turn integers,

        template_transform(config_id, angles.theta3, angles.theta4,
                           theta_plus, pi/2)
            == R(-pi*l/2 + phi1) @ S(r) @ R(phi2 - pi*p/2 - theta_plus)

    for every ``theta_plus`` (the sum angle only appends a final rotation, so
    the returned ``angles.theta_plus`` is 0).  All tan/cot and radical-sign
    branches are enumerated and the first branch whose reconstruction residual
    beats 1e-9 is returned.

    Raises:
        OutOfBranch: if a radicand is negative at (phi1, r) or no branch
            reconstructs; the caller should retry with an equivalent factor
            representation (phi1 shifted by a quarter turn with r negated).
    """
    if config_id not in CONFIG_IDS:
        raise DimensionMismatch(f"config_id must be in 1..5, got {config_id}")
    lq = _LEFT_TURN[config_id]
    pq = _RIGHT_TURN[config_id]
    target_left = rotate_of(-math.pi * lq / 2.0 + phi1, 1).matrix @ squeeze_of(r, 1).matrix

    if abs(r) < 1e-12:
        # Zero squeeze: the node angles only have to make the family core a
        # half-turn rotation; the residual rotation is absorbed into phi2.
        for t3, t4 in ((0.0, 0.0), (0.0, math.pi / 2), (math.pi / 2, 0.0), (math.pi / 2, math.pi / 2)):
            phi2 = None
            try:
                u = template_transform(config_id, t3, t4, 0.0, math.pi / 2).matrix
            except DegenerateAngles:
                continue
            rel = rotate_of(-(-math.pi * lq / 2.0 + phi1), 1).matrix @ u
            if abs(symplectic_defect(rel)) < 1e-9 and abs(rel[0, 0] ** 2 + rel[1, 0] ** 2 - 1.0) < 1e-9:
                phi2 = math.atan2(rel[1, 0], rel[0, 0]) + math.pi * pq / 2.0
                angles = FourNodeAngles(theta3=t3, theta4=t4, theta_plus=0.0, theta_minus=math.pi / 2)
                target = target_left @ rotate_of(phi2 - math.pi * pq / 2.0, 1).matrix
                if np.max(np.abs(u - target)) < 1e-9:
                    return angles, _wrap_angle(phi2)
        raise OutOfBranch("no rotation-only branch found at zero squeeze")

    rho = math.exp(r)
    sin1, cos1 = math.sin(phi1), math.cos(phi1)
    if abs(sin1) < 1e-12:
        raise OutOfBranch("closed forms are singular at sin(phi1) = 0; shift the representation")
    csc1 = 1.0 / sin1
    cot1 = cos1 / sin1

    rad3 = sin1 ** 2 * (rho ** 4 * cos1 ** 2 - rho ** 2 + sin1 ** 2)
    rad4 = (rho ** 2 - 1.0) * sin1 ** 2 * ((rho ** 2 + 1.0) * math.cos(2.0 * phi1) + rho ** 2 - 1.0)
    if rad3 < -1e-15 or rad4 < -1e-15:
        raise OutOfBranch("negative radicand at (phi1, r); no real branch here")
    rad3, rad4 = max(rad3, 0.0), max(rad4, 0.0)

    denom2 = rho ** 2 * csc1 ** 2 - 1.0

    candidates: list[tuple[float, float, float]] = []
    for sign3 in (1.0, -1.0):
        root3 = sign3 * math.sqrt(rad3)
        val3 = csc1 * root3 / rho
        if abs(denom2) < 1e-12:
            phi2_base = math.copysign(math.pi / 2.0, rho * (csc1 ** 3 * root3 - rho * cot1))
        else:
            phi2_base = math.atan(rho * (csc1 ** 3 * root3 - rho * cot1) / denom2)
        for sign4 in (1.0, -1.0):
            val4 = (2.0 * (rho ** 4 - 1.0) * cot1 + sign4 * math.sqrt(2.0) * rho * csc1 ** 3 * math.sqrt(rad4)) / (
                2.0 * rho ** 4 * cot1 ** 2 + 2.0
            )
            for theta3 in (math.atan(val3), _arccot(val3)):
                for theta4 in (math.atan(val4), _arccot(val4)):
                    for phi2 in (phi2_base, phi2_base + math.pi):
                        candidates.append((theta3, theta4, phi2))

    for theta3, theta4, phi2 in candidates:
        try:
            u = template_transform(config_id, theta3, theta4, 0.0, math.pi / 2).matrix
        except DegenerateAngles:
            continue
        target = target_left @ rotate_of(phi2 - math.pi * pq / 2.0, 1).matrix
        if np.max(np.abs(u - target)) < 1e-9:
            angles = FourNodeAngles(theta3=theta3, theta4=theta4, theta_plus=0.0, theta_minus=math.pi / 2)
            return angles, _wrap_angle(phi2)
    raise OutOfBranch(f"no tan/cot branch of family {config_id} reconstructs at (phi1={phi1:g}, r={r:g})")
