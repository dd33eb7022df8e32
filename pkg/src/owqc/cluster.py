"""Cluster graphs, node-role partitions, and the canonical preparation map.

A cluster state over ``n`` oscillators is described by a symmetric weighted
adjacency matrix ``A`` with zero diagonal.  The oscillators start squeezed in
their y-quadratures and are entangled by a linear (Bogoliubov) map; the only
ingredient of that map the computation result depends on is ``re_u``, the
real matrix carrying squeezed quadratures into the cluster frame
(``y_r = re_u @ y_s`` and likewise for x).  The canonical choice used here is

    re_u = (I + A^2)^{-1/2} @ O,

with ``O`` an arbitrary orthogonal generation freedom (identity by default).
It makes ``(I + iA) re_u`` unitary, which is exactly the unitarity residual
tracked by :func:`build_cluster`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidGraph, InvalidPartition, NotOrthogonal
from .matrix_core import as_real_matrix, inv_sqrt_posdef


@dataclass(frozen=True)
class ClusterGraph:
    """Symmetric weighted adjacency matrix with zero diagonal."""

    adjacency: np.ndarray

    def __post_init__(self):
        a = as_real_matrix(self.adjacency, "adjacency")
        if a.shape[0] != a.shape[1]:
            raise InvalidGraph(f"adjacency must be square, got shape {a.shape}")
        if not np.allclose(a, a.T, atol=1e-12, rtol=0.0):
            raise InvalidGraph("adjacency must be symmetric")
        if np.any(np.abs(np.diag(a)) > 0.0):
            raise InvalidGraph("adjacency must have a zero main diagonal")
        a.flags.writeable = False
        object.__setattr__(self, "adjacency", a)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]


@dataclass(frozen=True)
class NodePartition:
    """Role assignment for every cluster node.

    ``input_mixed`` lists the nodes each input beam is mixed with (one node
    per input, in input order), ``outputs`` the unmeasured nodes carrying the
    result, ``measured_only`` the remaining homodyned nodes.

    Two layouts are valid:

    * inputs mixed directly with the output nodes: ``outputs`` equals
      ``input_mixed`` (the unmeasured beam-splitter port is the output);
    * inputs mixed with measured nodes: the three lists are disjoint and
      ``outputs`` has the same length as ``input_mixed``.
    """

    input_mixed: tuple[int, ...]
    outputs: tuple[int, ...]
    measured_only: tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "input_mixed", tuple(int(i) for i in self.input_mixed))
        object.__setattr__(self, "outputs", tuple(int(i) for i in self.outputs))
        object.__setattr__(self, "measured_only", tuple(int(i) for i in self.measured_only))
        if not self.input_mixed:
            raise InvalidPartition("at least one input node is required")
        if len(set(self.input_mixed)) != len(self.input_mixed):
            raise InvalidPartition("each input mode must attach to its own cluster node")
        if len(self.outputs) != len(self.input_mixed):
            raise InvalidPartition("number of outputs must equal number of inputs")
        groups = [set(self.input_mixed), set(self.outputs), set(self.measured_only)]
        if self.mixes_into_outputs:
            covered = groups[0] | groups[2]
            if groups[0] & groups[2]:
                raise InvalidPartition("measured-only nodes overlap the input-mixed nodes")
            if len(covered) != len(self.input_mixed) + len(self.measured_only):
                raise InvalidPartition("duplicated node indices in partition")
        else:
            covered = groups[0] | groups[1] | groups[2]
            if len(covered) != len(self.input_mixed) + len(self.outputs) + len(self.measured_only):
                raise InvalidPartition("node roles must be disjoint")

    @property
    def mixes_into_outputs(self) -> bool:
        """True when the output modes are the free beam-splitter ports."""
        return self.outputs == self.input_mixed

    @property
    def m(self) -> int:
        return len(self.input_mixed)

    @property
    def l(self) -> int:
        return len(self.measured_only)

    @property
    def n(self) -> int:
        if self.mixes_into_outputs:
            return self.m + self.l
        return 2 * self.m + self.l

    @property
    def case(self) -> int:
        """Computation class: 1 (mix with outputs), 2 (n = 2m), 3 (n > 2m)."""
        if self.mixes_into_outputs:
            return 1
        return 2 if self.l == 0 else 3

    def node_order(self) -> tuple[int, ...]:
        """Nodes reordered into the canonical role layout.

        Mix-with-output layout: (input-mixed..., measured-only...).
        Mix-with-measured layout: (input-mixed..., outputs..., measured-only...).
        """
        if self.mixes_into_outputs:
            return self.input_mixed + self.measured_only
        return self.input_mixed + self.outputs + self.measured_only

    def validate_for(self, graph: ClusterGraph) -> None:
        nodes = set(self.node_order())
        if len(nodes) != graph.n or not nodes.issubset(range(graph.n)):
            raise InvalidPartition(
                f"partition covers nodes {sorted(nodes)} but the graph has {graph.n} nodes"
            )


@dataclass(frozen=True)
class PartitionBlocks:
    """Sub-blocks of the role-reordered adjacency matrix.

    For the mix-with-output layout only ``a11`` (input-mixed x input-mixed),
    ``a12`` (input-mixed x measured-only) and ``a22`` (measured-only square)
    exist.  For the mix-with-measured layout the roles are (1: input-mixed,
    2: output, 3: measured-only) and all six blocks are populated.
    """

    a11: np.ndarray
    a12: np.ndarray
    a22: np.ndarray
    a13: np.ndarray | None = None
    a23: np.ndarray | None = None
    a33: np.ndarray | None = None

    def reassemble(self) -> np.ndarray:
        """Rebuild the role-reordered adjacency from the blocks."""
        if self.a13 is None:
            return np.block([[self.a11, self.a12], [self.a12.T, self.a22]])
        return np.block(
            [
                [self.a11, self.a12, self.a13],
                [self.a12.T, self.a22, self.a23],
                [self.a13.T, self.a23.T, self.a33],
            ]
        )


def reordered_adjacency(graph: ClusterGraph, partition: NodePartition) -> np.ndarray:
    """Adjacency permuted into the partition's canonical role order."""
    order = np.array(partition.node_order(), dtype=int)
    return graph.adjacency[np.ix_(order, order)]


def partition_blocks(graph: ClusterGraph, partition: NodePartition) -> PartitionBlocks:
    """Slice the role-reordered adjacency into its defining sub-blocks.

    Raises:
        InvalidPartition: if the partition does not cover the graph.
    """
    partition.validate_for(graph)
    a = reordered_adjacency(graph, partition)
    m = partition.m
    if partition.mixes_into_outputs:
        return PartitionBlocks(a11=a[:m, :m], a12=a[:m, m:], a22=a[m:, m:])
    k = 2 * m
    return PartitionBlocks(
        a11=a[:m, :m],
        a12=a[:m, m:k],
        a22=a[m:k, m:k],
        a13=a[:m, k:],
        a23=a[m:k, k:],
        a33=a[k:, k:],
    )


@dataclass(frozen=True)
class ClusterModel:
    """A cluster graph together with its preparation map ``re_u``."""

    graph: ClusterGraph
    re_u: np.ndarray
    orthogonal_freedom: np.ndarray

    @property
    def n(self) -> int:
        return self.graph.n

    def unitarity_residual(self) -> float:
        """Max-abs residual of re_u^T (I + A^2) re_u = I."""
        a = self.graph.adjacency
        gram = np.eye(self.n) + a @ a
        return float(np.max(np.abs(self.re_u.T @ gram @ self.re_u - np.eye(self.n))))


def build_cluster(adjacency, orthogonal_freedom=None) -> ClusterModel:
    """Build a cluster model with the canonical preparation map.

    Args:
        adjacency: symmetric zero-diagonal weight matrix (or a
            :class:`ClusterGraph`).
        orthogonal_freedom: optional orthogonal matrix multiplying the
            canonical inverse square root; parametrizes the generation methods
            that share this graph.  Identity when omitted.

    Returns:
        A :class:`ClusterModel` whose ``re_u`` satisfies the unitarity
        invariant ``re_u^T (I + A^2) re_u = I``.

    Raises:
        InvalidGraph: for an asymmetric or nonzero-diagonal adjacency.
        NotOrthogonal: if ``orthogonal_freedom`` is supplied but not
            orthogonal.
    """
    graph = adjacency if isinstance(adjacency, ClusterGraph) else ClusterGraph(as_real_matrix(adjacency, "adjacency"))
    n = graph.n
    if orthogonal_freedom is None:
        o = np.eye(n)
    else:
        o = as_real_matrix(orthogonal_freedom, "orthogonal_freedom")
        if o.shape != (n, n):
            raise NotOrthogonal(f"orthogonal_freedom must be {n}x{n}, got {o.shape}")
        if np.max(np.abs(o.T @ o - np.eye(n))) > 1e-10:
            raise NotOrthogonal("orthogonal_freedom is not orthogonal")
    a = graph.adjacency
    re_u = inv_sqrt_posdef(np.eye(n) + a @ a) @ o
    re_u.flags.writeable = False
    o.flags.writeable = False
    return ClusterModel(graph=graph, re_u=re_u, orthogonal_freedom=o)


@dataclass(frozen=True)
class NullifierMap:
    """Matrix carrying squeezed quadratures ``y_s`` to the nullifiers.

    The nullifiers are the combinations ``Y - A X`` of cluster quadratures
    whose variance vanishes with infinite squeezing; in terms of the initial
    squeezed quadratures they read ``(A^2 + I) re_u @ y_s``.
    """

    matrix: np.ndarray


def nullifier_map(model: ClusterModel) -> NullifierMap:
    """Nullifier coefficients of ``y_s`` for a built cluster model.

    With the canonical generation choice this equals ``(I + A^2)^{1/2}``.
    """
    a = model.graph.adjacency
    mat = (a @ a + np.eye(model.n)) @ model.re_u
    mat.flags.writeable = False
    return NullifierMap(matrix=mat)


def preparation_symplectic(model: ClusterModel) -> np.ndarray:
    """Symplectic map carrying squeezed oscillators into the cluster state.

    In stacked (x..., y...) ordering the cluster quadratures read
    ``X = re_u x_s - A re_u y_s`` and ``Y = A re_u x_s + re_u y_s``.
    """
    a = model.graph.adjacency
    r = model.re_u
    return np.block([[r, -a @ r], [a @ r, r]])


def graph_and_partition_from_json(doc: dict) -> tuple[ClusterGraph, NodePartition, np.ndarray | None]:
    """Parse the scheme ingestion document.

    Expected keys: ``adjacency`` (matrix), ``partition`` (object with
    ``input_mixed``, ``outputs``, ``measured_only`` index lists) and optional
    ``orthogonal_freedom`` (matrix).
    """
    from .errors import ParseError

    try:
        graph = ClusterGraph(as_real_matrix(doc["adjacency"], "adjacency"))
        part = doc["partition"]
        partition = NodePartition(
            input_mixed=tuple(part["input_mixed"]),
            outputs=tuple(part["outputs"]),
            measured_only=tuple(part.get("measured_only", ())),
        )
    except KeyError as exc:
        raise ParseError(f"missing configuration key: {exc}") from exc
    partition.validate_for(graph)
    ortho = None
    if doc.get("orthogonal_freedom") is not None:
        ortho = as_real_matrix(doc["orthogonal_freedom"], "orthogonal_freedom")
    return graph, partition, ortho
