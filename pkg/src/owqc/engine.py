r"""Analytic input-to-output solutions for measurement-driven computation.

Every solver returns a :class:`CaseSolution` carrying the main transformation
``u_tilde`` (acting on the stacked input quadratures) and the error
coefficients ``e_on_yr`` multiplying the cluster-frame squeezed combinations
``y_r = re_u @ y_s``; the physical squeezing error enters the output as
``e_on_yr @ y_r``.  Measured photocurrents are taken as compensated
(feedforward), so they do not appear in the solutions.

Angle conventions (fixed package-wide): each input beam is mixed with its
cluster node on a symmetric beam splitter producing a sum port
(in + cluster)/sqrt2 and a difference port (in - cluster)/sqrt2.

* mix-with-output layout: the sum port is measured at ``theta_in`` and the
  difference port is the output; remaining nodes are measured at
  ``theta_cluster``.
* mix-with-measured layouts: the sum port is measured at the first m entries
  of ``theta_in``, the difference port at the last m; the sum and difference
  angle combinations driving the solutions are (sum-port + diff-port) and
  (sum-port - diff-port).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cluster import (
    ClusterGraph,
    ClusterModel,
    NodePartition,
    PartitionBlocks,
    build_cluster,
    partition_blocks,
)
from .errors import (
    DegenerateD,
    DimensionMismatch,
    LayoutMismatch,
    SingularA12,
    SingularBlock,
)
from .gates import FourNodeAngles, SymplecticTransform, phi_of, squeeze_of, template_transform
from .matrix_core import invert_checked, rcond


@dataclass(frozen=True)
class MeasurementAngles:
    """Homodyne phases of one measurement run.

    ``theta_in`` covers the measured beam-splitter ports: m entries (sum
    ports) in the mix-with-output layout, 2m entries (sum ports then
    difference ports) otherwise.  ``theta_cluster`` covers the measured-only
    nodes.  ``local_oscillator_amplitude`` only scales raw photocurrents and
    cancels under feedforward; it is kept for the simulation interface.
    """

    theta_in: np.ndarray
    theta_cluster: np.ndarray = field(default_factory=lambda: np.zeros(0))
    local_oscillator_amplitude: float = 1.0

    def __post_init__(self):
        t_in = np.atleast_1d(np.asarray(self.theta_in, dtype=float))
        t_cl = np.atleast_1d(np.asarray(self.theta_cluster, dtype=float)) if np.size(self.theta_cluster) else np.zeros(0)
        if not (np.all(np.isfinite(t_in)) and np.all(np.isfinite(t_cl))):
            raise DimensionMismatch("angles must be finite")
        if self.local_oscillator_amplitude <= 0:
            raise DimensionMismatch("local oscillator amplitude must be positive")
        object.__setattr__(self, "theta_in", t_in)
        object.__setattr__(self, "theta_cluster", t_cl)

    @classmethod
    def case1(cls, theta_in, theta_cluster=()) -> "MeasurementAngles":
        return cls(theta_in=np.atleast_1d(np.asarray(theta_in, dtype=float)), theta_cluster=np.asarray(theta_cluster, dtype=float))

    @classmethod
    def case2(cls, theta_sum_port, theta_diff_port) -> "MeasurementAngles":
        return cls.case3(theta_sum_port, theta_diff_port, ())

    @classmethod
    def case3(cls, theta_sum_port, theta_diff_port, theta_cluster=()) -> "MeasurementAngles":
        tp = np.atleast_1d(np.asarray(theta_sum_port, dtype=float))
        tm = np.atleast_1d(np.asarray(theta_diff_port, dtype=float))
        if tp.size != tm.size:
            raise DimensionMismatch("sum- and difference-port angle vectors must have equal length")
        return cls(theta_in=np.concatenate([tp, tm]), theta_cluster=np.asarray(theta_cluster, dtype=float))

    def validate_for(self, partition: NodePartition) -> None:
        expected_in = partition.m if partition.mixes_into_outputs else 2 * partition.m
        if self.theta_in.size != expected_in:
            raise DimensionMismatch(
                f"theta_in needs {expected_in} entries for this layout, got {self.theta_in.size}"
            )
        if self.theta_cluster.size != partition.l:
            raise DimensionMismatch(
                f"theta_cluster needs {partition.l} entries, got {self.theta_cluster.size}"
            )

    def split_ports(self, m: int) -> tuple[np.ndarray, np.ndarray]:
        """(sum-port angles, difference-port angles) for mix-with-measured runs."""
        if self.theta_in.size != 2 * m:
            raise DimensionMismatch("port splitting requires 2m port angles")
        return self.theta_in[:m], self.theta_in[m:]


@dataclass(frozen=True)
class CaseSolution:
    """Analytic solution of one measurement scheme.

    ``u_tilde`` acts on (x_in..., y_in...) ordered like the partition's input
    list; ``e_on_yr`` has one column per cluster node in the *original* node
    numbering.  ``intermediates`` stores the named blocks of the derivation
    (in the role-reordered frame) so they can be audited against their
    defining formulas.
    """

    u_tilde: SymplecticTransform
    e_on_yr: np.ndarray
    case_tag: str
    intermediates: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.u_tilde.matrix.shape[0] // 2


def effective_error_on_ys(solution: CaseSolution, model: ClusterModel) -> np.ndarray:
    """Re-express the error coefficients on the initial squeezed quadratures.

    Returns the matrix multiplying ``y_s`` in the output relation, i.e.
    ``e_on_yr @ re_u``.
    """
    if solution.e_on_yr.shape[1] != model.n:
        raise DimensionMismatch(
            f"solution has {solution.e_on_yr.shape[1]} error columns, model has {model.n} nodes"
        )
    return solution.e_on_yr @ model.re_u


def _scatter_columns(e_role: np.ndarray, order: tuple[int, ...], n: int) -> np.ndarray:
    """Map error columns from the role-reordered frame back to original node ids."""
    e = np.zeros((e_role.shape[0], n))
    e[:, list(order)] = e_role
    return e


def _diag(v: np.ndarray) -> np.ndarray:
    return np.diag(np.atleast_1d(v))


# ---------------------------------------------------------------------------
# Inputs mixed directly with the output nodes (n = m + l)
# ---------------------------------------------------------------------------


def _case1_setup(model: ClusterModel, partition: NodePartition, angles: MeasurementAngles):
    if not partition.mixes_into_outputs:
        raise LayoutMismatch("this solver needs the inputs mixed with the output nodes")
    partition.validate_for(model.graph)
    angles.validate_for(partition)
    blocks = partition_blocks(model.graph, partition)
    m, l = partition.m, partition.l
    cin, sin_ = _diag(np.cos(angles.theta_in)), _diag(np.sin(angles.theta_in))
    c1, s1 = _diag(np.cos(angles.theta_cluster)), _diag(np.sin(angles.theta_cluster))
    return blocks, m, l, cin, sin_, c1, s1


def _case1_assemble(
    m: int,
    transfer: np.ndarray,
    shear: np.ndarray,
    column: np.ndarray,
    row: np.ndarray,
) -> tuple[SymplecticTransform, np.ndarray]:
    """Common final assembly of both solution variants.

    ``transfer`` is the m x m map multiplying the measured-port cosine /
    sine combinations, ``shear`` the lower-left input coupling, ``column``
    the (x-row) error prefactor and ``row`` the shared error row.
    """
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    u = inv_sqrt2 * np.block(
        [
            [np.eye(m) + transfer[0], transfer[1]],
            [shear[0], np.eye(m) + shear[1]],
        ]
    )
    e_top = inv_sqrt2 * column @ row
    e_bottom = inv_sqrt2 * (shear[2] @ column - np.eye(m)) @ row
    return SymplecticTransform(u), np.vstack([e_top, e_bottom])


def solve_case1(
    model: ClusterModel,
    partition: NodePartition,
    angles: MeasurementAngles,
    variant: str = "upper",
) -> CaseSolution:
    """Solve the mix-with-output scheme by one of the two pivot choices.

    ``variant="upper"`` pivots on the measured-port block
    ``q = cos(t_in) + sin(t_in) a11``; ``variant="lower"`` pivots on the
    measured-node block ``d = cos(t_1) + sin(t_1) a22``.  Both produce the
    same solution whenever both pivots are invertible.

    Raises:
        SingularBlock: the chosen pivot (or its Schur complement) is
            singular, i.e. this variant does not apply at these angles.
        LayoutMismatch: partition is not in the mix-with-output layout.
    """
    if variant not in ("upper", "lower"):
        raise DimensionMismatch(f"variant must be 'upper' or 'lower', got {variant!r}")
    blocks, m, l, cin, sin_, c1, s1 = _case1_setup(model, partition, angles)
    a11, a12, a22 = blocks.a11, blocks.a12, blocks.a22
    n = m + l

    if variant == "upper":
        q = cin + sin_ @ a11
        q_inv = invert_checked(q, "measured-port pivot q")
        h = s1 @ (a22 - a12.T @ q_inv @ sin_ @ a12) + c1
        h_inv = invert_checked(h, "Schur complement h")
        lmat = np.eye(m) + q_inv @ sin_ @ a12 @ h_inv @ s1 @ a12.T
        v = a11 @ lmat - a12 @ h_inv @ s1 @ a12.T
        m_e1 = h_inv @ (c1 @ a12.T - s1 @ a12.T @ q_inv @ (cin @ a11 - sin_))
        m_e2 = h_inv @ (c1 @ a22 - s1 @ (a12.T @ q_inv @ cin @ a12 + np.eye(l)))
        row = np.hstack([np.eye(m) + a11 @ a11 + a12 @ m_e1, a11 @ a12 + a12 @ m_e2])
        u, e_role = _case1_assemble(
            m,
            transfer=(lmat @ q_inv @ cin, lmat @ q_inv @ sin_),
            shear=(v @ q_inv @ cin, v @ q_inv @ sin_, a11),
            column=q_inv @ sin_,
            row=row,
        )
        intermediates = {"q": q, "h": h, "l": lmat, "v": v, "m_e1": m_e1, "m_e2": m_e2}
        tag = "case1_q"
    else:
        d = c1 + s1 @ a22
        d_inv = invert_checked(d, "measured-node pivot d")
        p = a11 - a12 @ d_inv @ s1 @ a12.T
        k = cin + sin_ @ p
        k_inv = invert_checked(k, "Schur complement k")
        m_e3 = d_inv @ (c1 @ a12.T - s1 @ a12.T @ a11)
        m_e4 = d_inv @ (c1 @ a22 - s1 @ (a12.T @ a12 + np.eye(l)))
        row = np.hstack([np.eye(m) + a11 @ a11 + a12 @ m_e3, a11 @ a12 + a12 @ m_e4])
        u, e_role = _case1_assemble(
            m,
            transfer=(k_inv @ cin, k_inv @ sin_),
            shear=(p @ k_inv @ cin, p @ k_inv @ sin_, p),
            column=k_inv @ sin_,
            row=row,
        )
        intermediates = {"d": d, "p": p, "k": k, "m_e3": m_e3, "m_e4": m_e4}
        tag = "case1_d"

    return CaseSolution(
        u_tilde=u,
        e_on_yr=_scatter_columns(e_role, partition.node_order(), n),
        case_tag=tag,
        intermediates=intermediates,
    )


def case1_cz_squeeze(
    model: ClusterModel,
    partition: NodePartition,
    theta_cluster=None,
) -> CaseSolution:
    """Mix-with-output scheme at zero sum-port angles: squeeze times shear.

    Enforces ``theta_in = 0`` (no sine admixture on the measured ports); the
    solution is then ``S(-ln2/2) @ [[I, 0], [p, I]]`` with the coupling
    ``p = a11 - a12 (cot(t_1) + a22)^{-1} a12^T``.  With the default zero
    measured-node angles (or a12 = 0) this reduces to the entangling gate on
    the input-block weights alone, ``p = a11``.
    """
    theta = np.zeros(partition.l) if theta_cluster is None else np.asarray(theta_cluster, dtype=float)
    angles = MeasurementAngles.case1(np.zeros(partition.m), theta)
    solution = solve_case1(model, partition, angles, variant="lower")
    p = solution.intermediates["p"]
    shear = np.block([[np.eye(partition.m), np.zeros((partition.m, partition.m))], [p, np.eye(partition.m)]])
    u = SymplecticTransform(squeeze_of(-math.log(2.0) / 2.0, partition.m).matrix @ shear)
    if np.max(np.abs(u.matrix - solution.u_tilde.matrix)) > 1e-10:
        raise SingularBlock("factorized form disagrees with the direct solution")
    intermediates = dict(solution.intermediates)
    return CaseSolution(
        u_tilde=u,
        e_on_yr=solution.e_on_yr,
        case_tag="case1_cz_squeeze",
        intermediates=intermediates,
    )


# ---------------------------------------------------------------------------
# Inputs mixed with measured nodes, n = 2m
# ---------------------------------------------------------------------------


def _weight_factor(a11: np.ndarray, a12: np.ndarray, a22: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Weight-only factor of the mix-with-measured solutions and the
    nullifier coefficient matrix."""
    m = a11.shape[0]
    if rcond(a12) < 1e-12:
        raise SingularA12("input-to-output coupling block is singular; inputs cannot be routed")
    a12_inv = invert_checked(a12, "input-to-output coupling")
    weight = np.block(
        [
            [-a12_inv, a12_inv @ a11],
            [-a22 @ a12_inv, a22 @ a12_inv @ a11 - a12.T],
        ]
    )
    null_coeff = -np.block(
        [
            [a12_inv, np.zeros((m, m))],
            [a22 @ a12_inv, -np.eye(m)],
        ]
    )
    return weight, null_coeff, a12_inv


def solve_case2(model: ClusterModel, partition: NodePartition, angles: MeasurementAngles) -> CaseSolution:
    """Solve the mix-with-measured scheme with n = 2m.

    The solution factorizes into the weight-only matrix, applied to the
    symmetric-angle port map with sum/difference combinations of the two port
    phases; the error is carried by the cluster nullifiers.

    Raises:
        SingularA12: the coupling block between input-mixed and output nodes
            is singular.
        DegenerateAngles: the difference angle hits a multiple of pi.
        LayoutMismatch: partition is not the n = 2m mix-with-measured layout.
    """
    if partition.case != 2:
        raise LayoutMismatch("this solver needs disjoint input/output nodes and no measured-only nodes")
    partition.validate_for(model.graph)
    angles.validate_for(partition)
    blocks = partition_blocks(model.graph, partition)
    m = partition.m
    t_sum, t_diff = angles.split_ports(m)
    theta_plus, theta_minus = t_sum + t_diff, t_sum - t_diff

    weight, null_coeff, _ = _weight_factor(blocks.a11, blocks.a12, blocks.a22)
    phi = phi_of(theta_plus, theta_minus)
    u = SymplecticTransform(weight @ phi.matrix)

    a_role = blocks.reassemble()
    e_role = null_coeff @ (a_role @ a_role + np.eye(2 * m))
    return CaseSolution(
        u_tilde=u,
        e_on_yr=_scatter_columns(e_role, partition.node_order(), model.n),
        case_tag="case2",
        intermediates={"weight_factor": weight, "nullifier_coeff": null_coeff, "phi": phi.matrix},
    )


# ---------------------------------------------------------------------------
# Inputs mixed with measured nodes, n = 2m + l
# ---------------------------------------------------------------------------


def _case3_setup(model: ClusterModel, partition: NodePartition, angles: MeasurementAngles):
    if partition.case != 3:
        raise LayoutMismatch("this solver needs disjoint input/output nodes and at least one measured-only node")
    partition.validate_for(model.graph)
    angles.validate_for(partition)
    blocks = partition_blocks(model.graph, partition)
    m = partition.m
    t_sum, t_diff = angles.split_ports(m)
    c3, s3 = _diag(np.cos(angles.theta_cluster)), _diag(np.sin(angles.theta_cluster))
    return blocks, m, partition.l, t_sum + t_diff, t_sum - t_diff, c3, s3


def solve_case3(
    model: ClusterModel,
    partition: NodePartition,
    angles: MeasurementAngles,
    variant: str = "upper",
) -> CaseSolution:
    """Solve the mix-with-measured scheme with n = 2m + l.

    ``variant="upper"`` pivots on the mixed-port block (requires the
    input-to-output coupling a12 invertible); ``variant="lower"`` pivots on
    the measured-node block ``dt = cos(t_3) + sin(t_3) a33`` (requires the
    screened coupling kt2 invertible).  The error matrix is assembled
    element by element in both variants.

    Raises:
        SingularBlock / SingularA12: the variant's pivots are singular.
        DegenerateAngles: the port difference angle hits a multiple of pi.
        LayoutMismatch: wrong partition layout.
    """
    if variant not in ("upper", "lower"):
        raise DimensionMismatch(f"variant must be 'upper' or 'lower', got {variant!r}")
    blocks, m, l, theta_plus, theta_minus, c3, s3 = _case3_setup(model, partition, angles)
    a11, a12, a22 = blocks.a11, blocks.a12, blocks.a22
    a13, a23, a33 = blocks.a13, blocks.a23, blocks.a33
    phi = phi_of(theta_plus, theta_minus)
    cz22 = np.block([[np.eye(m), np.zeros((m, m))], [a22, np.eye(m)]])
    i_m, i_l = np.eye(m), np.eye(l)

    if variant == "upper":
        if rcond(a12) < 1e-12:
            raise SingularA12("input-to-output coupling block is singular for the upper variant")
        a12_inv = invert_checked(a12, "input-to-output coupling")
        h = c3 + s3 @ (a33 - a23.T @ a12_inv @ a13)
        h_inv = invert_checked(h, "screened measured-node pivot h")
        k1 = a12_inv @ a13 @ h_inv @ s3
        k2 = a23.T @ a12_inv @ a11 - a13.T
        core = np.block(
            [
                [-(k1 @ a23.T + i_m) @ a12_inv, k1 @ k2 + a12_inv @ a11],
                [a23 @ h_inv @ s3 @ a23.T @ a12_inv, -a12.T - a23 @ h_inv @ s3 @ k2],
            ]
        )
        u = SymplecticTransform(cz22 @ core @ phi.matrix)

        hc = h_inv @ c3
        hs = h_inv @ s3
        e11_core = -(k1 @ a23.T + i_m) @ a12_inv - (k1 @ k2 + a12_inv @ a11) @ a11 - a12_inv @ a13 @ hc @ a13.T
        e11 = e11_core - a12.T
        e12 = -(k1 @ k2 + a12_inv @ a11) @ a12 - a12_inv @ a13 @ hc @ a23.T - a22
        e13 = -(k1 @ k2 + a12_inv @ a11) @ a13 + a12_inv @ a13 @ h_inv @ (s3 - c3 @ a33) - a23
        e21 = a12.T @ a11 + a23 @ (hs @ (a23.T @ a12_inv + k2 @ a11) + hc @ a13.T) + a22 @ e11_core
        e22 = (
            i_m
            + a12.T @ a12
            + a22 @ (-(k1 @ k2 + a12_inv @ a11) @ a12 - a12_inv @ a13 @ hc @ a23.T)
            + a23 @ (hs @ k2 @ a12 + hc @ a23.T)
        )
        e23 = (
            a12.T @ a13
            + a22 @ (-(k1 @ k2 + a12_inv @ a11) @ a13 + a12_inv @ a13 @ h_inv @ (s3 - c3 @ a33))
            + a23 @ (hs @ k2 @ a13 + h_inv @ (c3 @ a33 - s3))
        )
        intermediates = {"h_schur": h, "k1": k1, "k2": k2, "core": core, "phi": phi.matrix}
        tag = "case3_q"
    else:
        dt = c3 + s3 @ a33
        dt_inv = invert_checked(dt, "measured-node pivot dt")
        kt1 = a11 - a13 @ dt_inv @ s3 @ a13.T
        kt2 = a12 - a13 @ dt_inv @ s3 @ a23.T
        if rcond(kt2) < 1e-12:
            raise SingularBlock("screened input-to-output coupling kt2 is singular")
        kt2_inv = invert_checked(kt2, "screened coupling kt2")
        kt3 = a23.T @ kt2_inv @ kt1 - a13.T
        core = np.block(
            [
                [-kt2_inv, kt2_inv @ kt1],
                [a23 @ dt_inv @ s3 @ a23.T @ kt2_inv, -a12.T - a23 @ dt_inv @ s3 @ kt3],
            ]
        )
        u = SymplecticTransform(cz22 @ core @ phi.matrix)

        dc = dt_inv @ c3
        ds = dt_inv @ s3
        screen = i_l + s3 @ a23.T @ kt2_inv @ a13 @ dt_inv
        e11_core = -kt2_inv @ kt1 @ a11 - kt2_inv @ a13 @ dc @ a13.T - kt2_inv
        e11 = e11_core - a12.T
        e12 = -kt2_inv @ kt1 @ a12 - kt2_inv @ a13 @ dc @ a23.T - a22
        e13 = -kt2_inv @ kt1 @ a13 + kt2_inv @ a13 @ dt_inv @ (s3 - c3 @ a33) - a23
        e21 = (
            a12.T @ a11
            - a22 @ kt2_inv @ (kt1 @ a11 + a13 @ dc @ a13.T + i_m)
            + a23 @ dt_inv @ (s3 @ a23.T @ kt2_inv + s3 @ kt3 @ a11 + screen @ c3 @ a13.T)
        )
        e22 = (
            i_m
            + a12.T @ a12
            - a22 @ kt2_inv @ (kt1 @ a12 + a13 @ dc @ a23.T)
            + a23 @ dt_inv @ (s3 @ kt3 @ a12 + screen @ c3 @ a23.T)
        )
        e23 = (
            a12.T @ a13
            - a22 @ kt2_inv @ (kt1 @ a13 - a13 @ dt_inv @ (s3 - c3 @ a33))
            + a23 @ dt_inv @ (s3 @ kt3 @ a13 - screen @ (s3 - c3 @ a33))
        )
        intermediates = {"dt": dt, "kt1": kt1, "kt2": kt2, "kt3": kt3, "core": core, "phi": phi.matrix}
        tag = "case3_d"

    e_role = np.block([[e11, e12, e13], [e21, e22, e23]])
    return CaseSolution(
        u_tilde=u,
        e_on_yr=_scatter_columns(e_role, partition.node_order(), model.n),
        case_tag=tag,
        intermediates=intermediates,
    )


# ---------------------------------------------------------------------------
# Dedicated small families
# ---------------------------------------------------------------------------


def three_node_family(
    a12: float,
    a13: float,
    a23: float,
    theta3: float,
    theta_plus: float,
    theta_minus: float,
) -> CaseSolution:
    """Single-mode solution on the weighted three-node graph.

    Node roles: 0 input-mixed, 1 output, 2 measured-only; ``theta3`` is the
    measured-only node's phase and ``theta_plus``/``theta_minus`` the port
    angle combinations.

    Raises:
        DegenerateD: the weighted denominator d = a12 cos(t3) - a23 a13
            sin(t3) vanishes, so the scheme cannot route the input.
    """
    c3, s3 = math.cos(theta3), math.sin(theta3)
    d = a12 * c3 - a23 * a13 * s3
    if abs(d) < 1e-12:
        raise DegenerateD("three-node denominator vanished at this measured-node angle")
    weight = (
        np.array(
            [
                [-c3, -(a13**2) * s3],
                [a23**2 * s3, -a12 * d + a13 * a12 * a23 * s3],
            ]
        )
        / d
    )
    u = SymplecticTransform(weight @ phi_of(theta_plus, theta_minus).matrix)

    adjacency = np.array([[0.0, a12, a13], [a12, 0.0, a23], [a13, a23, 0.0]])
    model = build_cluster(adjacency)
    partition = NodePartition(input_mixed=(0,), outputs=(1,), measured_only=(2,))
    angles = MeasurementAngles.case3([(theta_plus + theta_minus) / 2.0], [(theta_plus - theta_minus) / 2.0], [theta3])
    try:
        general = solve_case3(model, partition, angles, variant="upper")
    except (SingularA12, SingularBlock):
        general = solve_case3(model, partition, angles, variant="lower")
    return CaseSolution(
        u_tilde=u,
        e_on_yr=general.e_on_yr,
        case_tag="three_node",
        intermediates={"d": d, "weight_factor": weight},
    )


@dataclass(frozen=True)
class ZFamilyRecipe:
    """Weights and angles realizing one integer-parametrized shear target."""

    z: int
    a12: float
    a13: float
    a23: float
    theta3: float
    theta_minus: float

    def theta_plus_for(self, theta: float) -> float:
        """Sum angle realizing the target at rotation parameter ``theta``."""
        return -theta


def three_node_weights_for_z(z: int, a23: float) -> ZFamilyRecipe:
    """Graph weights and measurement angles hitting the z-indexed target.

    Each target needs its own weights (a13 = a23 sqrt(1+z),
    a12 = 1/(1 + sqrt(1+z))), which is the non-universality argument for the
    three-node graph: changing the target means regenerating the cluster.
    """
    if z < 1 or a23 == 0.0:
        raise DimensionMismatch("z must be a positive integer and a23 nonzero")
    root = math.sqrt(1.0 + z)
    return ZFamilyRecipe(
        z=int(z),
        a12=1.0 / (1.0 + root),
        a13=a23 * root,
        a23=float(a23),
        theta3=math.pi / 2.0 - math.atan(a23**2 * z),
        theta_minus=math.pi / 2.0,
    )


def z_target_matrix(z: int, theta: float) -> np.ndarray:
    """The integer-parametrized single-mode target family."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array(
        [
            [z * c + (z + 1) * s, (z + 1) * c - z * s],
            [-c - s, -c + s],
        ]
    )


#: Error coefficient tables of the five four-node families, as functions of
#: the two measured-node angles.  Columns follow the family node order
#: (input-mixed, output, measured-only pair).  Each table forms a consistent
#: solution pair with the family's main transformation: the implied output
#: covariance reproduces the brute-force Gaussian simulation of the family's
#: representative graph.
def _four_node_error(config_id: int, theta3: float, theta4: float) -> np.ndarray:
    t3, t4 = math.tan(theta3), math.tan(theta4)
    has_cot3 = config_id in (2, 3)
    has_cot4 = config_id in (1, 3)
    c3 = 1.0 / t3 if t3 != 0.0 else math.inf
    c4 = 1.0 / t4 if t4 != 0.0 else math.inf
    if (has_cot3 and not math.isfinite(c3)) or (has_cot4 and not math.isfinite(c4)):
        from .errors import DegenerateAngles

        raise DegenerateAngles("cot diverges at this node angle")
    if config_id == 1:
        return np.array(
            [
             [-3 * c4, -c4, 1 - 2 * t3 * c4, 3 - t3 * c4],
             [2, -1, 2 * t3, t3],
            ]
        )
    if config_id == 2:
        return np.array(
            [
             [-2 * c3, -c3, 3, 1],
             [1 - 2 * c3 * t4, -2 - c3 * t4, 2 * t4, -t4],
            ]
        )
    if config_id == 3:
        return np.array(
            [
             [2 * c3 * c4 - 1, -c4, -3 * c4, 2 + c3 * c4],
             [-2 * c3, -1, 2, -c3],
            ]
        )
    if config_id == 4:
        return np.array(
            [
             [3, t3, 2 * t3, 1],
             [2 * t4, t3 * t4 - 3, 2 * t3 * t4 - 1, -t4],
            ]
        )
    return np.array(
        [
         [t3 * t4 - 3, -2 * t4, -t3 * t4 - 2, -3 * t4],
         [-t3, 3, t3, 2],
        ]
    )


def four_node_transform(config_id: int, angles: FourNodeAngles) -> CaseSolution:
    """Main transformation and error coefficients of four-node family 1..5.

    The error columns follow the family's node order (input-mixed, output,
    then the two measured-only nodes whose phases are theta3 and theta4).

    Raises:
        DegenerateAngles: at singular tan/cot arguments for this family.
    """
    u = template_transform(config_id, angles.theta3, angles.theta4, angles.theta_plus, angles.theta_minus)
    e = _four_node_error(config_id, angles.theta3, angles.theta4)
    return CaseSolution(
        u_tilde=u,
        e_on_yr=e,
        case_tag="four_node",
        intermediates={"config_id": config_id, "theta3": angles.theta3, "theta4": angles.theta4},
    )
