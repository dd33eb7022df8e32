"""Brute-force Gaussian verifier for the analytic measurement solutions.

The oracle never touches the closed-form solutions: it builds the physical
pipeline (squeezed oscillators, cluster preparation, symmetric beam splitters,
homodyne measurements with feedforward) as explicit linear maps over the
initial quadratures and propagates Gaussian moments through it.  Vacuum
variance is 1/4 and a squeezed y-quadrature carries variance e^{-2r}/4.

Feedforward gains are derived here from the raw scheme geometry alone: the
output displacements are chosen to cancel every anti-squeezed oscillator
quadrature from the output operators, which is exactly the role the measured
photocurrents play in the analytic treatment.  After that cancellation the
outputs depend only on the input quadratures and the squeezed y-quadratures,
so the reported moments can be compared against any candidate (U, E) pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cluster import ClusterModel, NodePartition, preparation_symplectic
from .errors import DegenerateVariance, DimensionMismatch, ParseError, SingularBlock
from .matrix_core import invert_checked, rcond, symplectic_form

VACUUM_VARIANCE = 0.25


@dataclass(frozen=True)
class GaussianState:
    """Mean vector and covariance matrix of an n-mode Gaussian state.

    Quadrature ordering is (x_1..x_n, y_1..y_n).
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        cov = np.asarray(self.cov, dtype=float)
        if mean.ndim != 1 or cov.shape != (mean.size, mean.size):
            raise DimensionMismatch(f"mean {mean.shape} and covariance {cov.shape} are inconsistent")
        if mean.size % 2 != 0:
            raise DimensionMismatch("state dimension must be even (x..., y... ordering)")
        if cov.size and np.max(np.abs(cov - cov.T)) > 1e-10:
            raise DimensionMismatch("covariance must be symmetric")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", (cov + cov.T) / 2.0)

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2

    def symplectic_eigenvalues(self) -> np.ndarray:
        """Sorted symplectic spectrum; >= 1/4 for physical states."""
        if self.n_modes == 0:
            return np.zeros(0)
        j = symplectic_form(self.n_modes)
        eigs = np.linalg.eigvals(j @ self.cov)
        return np.sort(np.abs(eigs.imag))[self.n_modes:]

    def is_physical(self, tol: float = 1e-9) -> bool:
        if self.n_modes == 0:
            return True
        return bool(np.min(self.symplectic_eigenvalues()) >= VACUUM_VARIANCE - tol)


def vacuum(n: int) -> GaussianState:
    return init_squeezed(n, 0.0)


def init_squeezed(n: int, r: float) -> GaussianState:
    """n oscillators squeezed in y: variances (e^{2r}/4, e^{-2r}/4)."""
    if n < 0 or not math.isfinite(r):
        raise DimensionMismatch("mode count must be non-negative and r finite")
    diag = np.concatenate([np.full(n, VACUUM_VARIANCE * math.exp(2 * r)), np.full(n, VACUUM_VARIANCE * math.exp(-2 * r))])
    return GaussianState(mean=np.zeros(2 * n), cov=np.diag(diag))


def apply_symplectic(state: GaussianState, s) -> GaussianState:
    """Propagate mean and covariance through a symplectic map."""
    mat = s.matrix if hasattr(s, "matrix") else np.asarray(s, dtype=float)
    if mat.shape != (2 * state.n_modes, 2 * state.n_modes):
        raise DimensionMismatch(f"transform shape {mat.shape} does not fit a {state.n_modes}-mode state")
    return GaussianState(mean=mat @ state.mean, cov=mat @ state.cov @ mat.T)


def _beamsplitter_matrix(n_modes: int, mode_a: int, mode_b: int) -> np.ndarray:
    """Symmetric 50/50 mixer: a <- (a + b)/sqrt2, b <- (a - b)/sqrt2 on x and y."""
    s = np.eye(2 * n_modes)
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    for off in (0, n_modes):
        a, b = off + mode_a, off + mode_b
        s[a, a] = s[a, b] = inv_sqrt2
        s[b, a] = inv_sqrt2
        s[b, b] = -inv_sqrt2
    return s


def beamsplitter_mix(state: GaussianState, mode_a: int, mode_b: int) -> GaussianState:
    """Mix two modes on a symmetric beam splitter.

    Mode ``mode_a`` carries the sum port (a + b)/sqrt2 afterwards and
    ``mode_b`` the difference port (a - b)/sqrt2.
    """
    n = state.n_modes
    if not (0 <= mode_a < n and 0 <= mode_b < n) or mode_a == mode_b:
        raise DimensionMismatch(f"beam splitter needs two distinct modes below {n}")
    return apply_symplectic(state, _beamsplitter_matrix(n, mode_a, mode_b))


def homodyne_measure(
    state: GaussianState,
    mode: int,
    angle: float,
    outcome: float | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[GaussianState, float]:
    """Measure x cos(angle) + y sin(angle) of one mode and condition the rest.

    The measured mode is removed from the returned state (detection destroys
    the anti-measured quadrature); the remaining modes are updated by Gaussian
    conditioning on the observed value.  When ``outcome`` is omitted it is
    sampled from the marginal distribution of the measured quadrature.

    Returns:
        (reduced state, outcome value).

    Raises:
        DegenerateVariance: if the measured quadrature has no variance.
    """
    n = state.n_modes
    if not 0 <= mode < n:
        raise DimensionMismatch(f"mode {mode} out of range for {n}-mode state")
    row = np.zeros(2 * n)
    row[mode] = math.cos(angle)
    row[n + mode] = math.sin(angle)
    var = float(row @ state.cov @ row)
    if var <= 1e-15:
        raise DegenerateVariance("measured quadrature variance vanishes")
    mu = float(row @ state.mean)
    if outcome is None:
        rng = rng if rng is not None else np.random.default_rng()
        outcome = rng.normal(mu, math.sqrt(var))
    keep = [i for i in range(n) if i != mode] + [n + i for i in range(n) if i != mode]
    cross = state.cov @ row
    cond_mean = state.mean + cross * ((outcome - mu) / var)
    cond_cov = state.cov - np.outer(cross, cross) / var
    return GaussianState(mean=cond_mean[keep], cov=cond_cov[np.ix_(keep, keep)]), float(outcome)


@dataclass(frozen=True)
class SchemeProgram:
    """Full description of one measurement run.

    ``angles.theta_in`` holds the homodyne phases of the beam-splitter ports
    (m entries for the mix-with-output layout; 2m entries, sum port first,
    for the mix-with-measured layouts) and ``angles.theta_cluster`` the phases
    of the measured-only nodes.  ``squeezing`` is the common log-gain r of the
    cluster oscillators; ``input_state`` an m-mode Gaussian state.
    """

    model: ClusterModel
    partition: NodePartition
    angles: "MeasurementAngles"
    input_state: GaussianState
    squeezing: float

    def __post_init__(self):
        self.partition.validate_for(self.model.graph)
        self.angles.validate_for(self.partition)
        if self.input_state.n_modes != self.partition.m:
            raise DimensionMismatch(
                f"input state has {self.input_state.n_modes} modes, partition expects {self.partition.m}"
            )
        if not math.isfinite(self.squeezing):
            raise DimensionMismatch("squeezing must be finite")


def _layout(partition: NodePartition) -> dict:
    """Joint-system index bookkeeping: inputs first, then cluster nodes."""
    m, n = partition.m, partition.n
    total = m + n
    return {
        "total": total,
        "x_in": np.arange(m),
        "y_in": total + np.arange(m),
        "x_cl": m + np.arange(n),
        "y_cl": total + m + np.arange(n),
    }


def total_transform(program: SchemeProgram) -> np.ndarray:
    """Linear map from initial quadratures (inputs, oscillators) to the
    quadratures present after cluster preparation and beam splitting."""
    part = program.partition
    m, n = part.m, part.n
    lay = _layout(part)
    total = lay["total"]

    prep = np.eye(2 * total)
    s_cl = preparation_symplectic(program.model)
    cl = np.concatenate([lay["x_cl"], lay["y_cl"]])
    prep[np.ix_(cl, cl)] = s_cl

    mix = np.eye(2 * total)
    for k, node in enumerate(part.input_mixed):
        mix = _beamsplitter_matrix(total, k, m + node) @ mix
    return mix @ prep


def measurement_rows(program: SchemeProgram) -> tuple[np.ndarray, np.ndarray]:
    """Measured-quadrature rows W and output rows O over initial quadratures.

    Measured rows are ordered: sum-port modes (input order), then difference
    ports when those are measured too, then measured-only nodes (partition
    order).  Output rows are the x rows of all outputs followed by their y
    rows.
    """
    part = program.partition
    m, n = part.m, part.n
    lay = _layout(part)
    t = total_transform(program)

    def quad_row(mode: int, angle: float) -> np.ndarray:
        return math.cos(angle) * t[mode] + math.sin(angle) * t[lay["total"] + mode]

    rows = []
    theta_in = program.angles.theta_in
    if part.mixes_into_outputs:
        for k in range(m):
            rows.append(quad_row(k, theta_in[k]))
        out_modes = [m + node for node in part.input_mixed]
    else:
        for k in range(m):
            rows.append(quad_row(k, theta_in[k]))
        for k, node in enumerate(part.input_mixed):
            rows.append(quad_row(m + node, theta_in[m + k]))
        out_modes = [m + node for node in part.outputs]
    for k, node in enumerate(part.measured_only):
        rows.append(quad_row(m + node, program.angles.theta_cluster[k]))

    out_rows = [t[mode] for mode in out_modes] + [t[lay["total"] + mode] for mode in out_modes]
    return np.array(rows), np.array(out_rows)


@dataclass(frozen=True)
class TransferMatrices:
    """Feedforward-corrected transfer decomposition of a scheme.

    ``output = u_tilde @ (x_in, y_in) + error_on_ys @ y_s`` once each output
    quadrature is displaced by ``-gains @ (measured values)``.
    """

    u_tilde: np.ndarray
    error_on_ys: np.ndarray
    gains: np.ndarray


def transfer_matrices(program: SchemeProgram) -> TransferMatrices:
    """Derive (U, E, feedforward gains) from the physical pipeline alone.

    The gains solve for zero anti-squeezed content in the corrected outputs;
    the measured rows always close over those quadratures, so a singular
    system here means the scheme cannot route its inputs at these angles.

    Raises:
        SingularBlock: if the measured quadratures cannot eliminate the
            anti-squeezed oscillator quadratures.
    """
    part = program.partition
    lay = _layout(part)
    w, o = measurement_rows(program)
    w_xs = w[:, lay["x_cl"]]
    if w_xs.shape[0] != w_xs.shape[1] or rcond(w_xs) < 1e-12:
        raise SingularBlock("measured quadratures do not determine the anti-squeezed content at these angles")
    gains = o[:, lay["x_cl"]] @ invert_checked(w_xs, "measured anti-squeezed block")
    g = o - gains @ w
    in_cols = np.concatenate([lay["x_in"], lay["y_in"]])
    u_tilde = g[:, in_cols]
    error_on_ys = g[:, lay["y_cl"]]
    return TransferMatrices(u_tilde=u_tilde, error_on_ys=error_on_ys, gains=gains)


def _initial_moments(program: SchemeProgram) -> tuple[np.ndarray, np.ndarray]:
    part = program.partition
    m, n = part.m, part.n
    lay = _layout(part)
    total = lay["total"]
    mean = np.zeros(2 * total)
    cov = np.zeros((2 * total, 2 * total))
    in_cols = np.concatenate([lay["x_in"], lay["y_in"]])
    mean[in_cols] = program.input_state.mean
    cov[np.ix_(in_cols, in_cols)] = program.input_state.cov
    osc = init_squeezed(n, program.squeezing)
    cl_cols = np.concatenate([lay["x_cl"], lay["y_cl"]])
    cov[np.ix_(cl_cols, cl_cols)] = osc.cov
    return mean, cov


@dataclass(frozen=True)
class SimulationResult:
    """Output-moment estimate of one simulated scheme."""

    state: GaussianState
    mode: str
    samples: int
    seed: int | None = None


def simulate_owqc(
    program: SchemeProgram,
    mode: str = "covariance_exact",
    samples: int = 100_000,
    seed: int | None = None,
) -> SimulationResult:
    """Run prepare -> mix -> measure-with-feedforward and report output moments.

    In ``covariance_exact`` mode the ensemble moments of the feedforward-
    corrected outputs are propagated in closed form (measurement outcomes are
    conditioned at zero, so means are exact and the feedforward is implicit).
    In ``monte_carlo`` mode initial quadratures are sampled, every homodyne
    value is read out, and the corresponding displacement is applied to each
    output before estimating moments; this is the statistically exact
    phase-space simulation of the Gaussian circuit.
    """
    if mode not in ("covariance_exact", "monte_carlo"):
        raise ParseError(f"unknown simulation mode: {mode!r}")
    w, o = measurement_rows(program)
    tm = transfer_matrices(program)
    g = o - tm.gains @ w
    mean0, cov0 = _initial_moments(program)
    if mode == "covariance_exact":
        return SimulationResult(
            state=GaussianState(mean=g @ mean0, cov=g @ cov0 @ g.T),
            mode=mode,
            samples=0,
            seed=seed,
        )
    rng = np.random.default_rng(seed)
    vals, vecs = np.linalg.eigh(cov0)
    sqrt_cov = vecs * np.sqrt(np.clip(vals, 0.0, None))
    draws = mean0 + rng.standard_normal((int(samples), mean0.size)) @ sqrt_cov.T
    currents = draws @ w.T
    outputs = draws @ o.T - currents @ tm.gains.T
    est_mean = outputs.mean(axis=0)
    est_cov = np.cov(outputs.T, ddof=1)
    return SimulationResult(
        state=GaussianState(mean=est_mean, cov=np.atleast_2d(est_cov)),
        mode=mode,
        samples=int(samples),
        seed=seed,
    )


def predicted_output_covariance(u_tilde: np.ndarray, error_on_ys: np.ndarray, input_cov: np.ndarray, squeezing: float) -> np.ndarray:
    """Covariance U Sigma_in U^T + (e^{-2r}/4) E E^T implied by a solution."""
    noise = VACUUM_VARIANCE * math.exp(-2.0 * squeezing)
    return u_tilde @ input_cov @ u_tilde.T + noise * error_on_ys @ error_on_ys.T


@dataclass(frozen=True)
class DefectReport:
    """Outcome of an oracle-versus-analytic comparison."""

    defect: float
    tolerance: float
    passed: bool
    mode: str
    samples: int
    stat_sigma: float = 0.0


def compare_with_analytic(
    solution,
    model: ClusterModel,
    program: SchemeProgram,
    tolerance: float = 1e-9,
    mode: str = "covariance_exact",
    samples: int = 100_000,
    seed: int | None = None,
) -> DefectReport:
    """Check a CaseSolution's (U, E) against the simulated output moments.

    The comparison target is ``U Sigma_in U^T + (e^{-2r}/4) E_s E_s^T`` with
    ``E_s`` the solution's error coefficients re-expressed on the squeezed
    quadratures.  In ``covariance_exact`` mode ``tolerance`` bounds the
    max-abs defect directly; in ``monte_carlo`` mode it is a relative floor
    added to the elementwise three-sigma statistical band.
    """
    from .engine import effective_error_on_ys

    e_ys = effective_error_on_ys(solution, model)
    u = solution.u_tilde.matrix
    if u.shape[0] != 2 * program.partition.m:
        raise DimensionMismatch("solution size does not match the program's input count")
    predicted = predicted_output_covariance(u, e_ys, program.input_state.cov, program.squeezing)
    sim = simulate_owqc(program, mode=mode, samples=samples, seed=seed)
    delta = np.abs(sim.state.cov - predicted)
    defect = float(np.max(delta))
    if mode == "covariance_exact":
        return DefectReport(defect=defect, tolerance=tolerance, passed=bool(defect < tolerance), mode=mode, samples=0)
    diag = np.diag(sim.state.cov)
    sigma = np.sqrt((np.outer(diag, diag) + sim.state.cov**2) / max(samples, 1))
    scale = float(np.max(np.abs(predicted)))
    band = 3.0 * sigma + tolerance * scale
    return DefectReport(
        defect=defect,
        tolerance=tolerance,
        passed=bool(np.all(delta <= band)),
        mode=mode,
        samples=samples,
        stat_sigma=float(np.max(sigma)),
    )


def program_from_json(doc: dict) -> SchemeProgram:
    """Build a SchemeProgram from the scheme ingestion document.

    Recognized keys beyond the graph/partition document: ``angles``
    (``theta_in`` and ``theta_cluster`` lists), ``squeezing_db`` (converted
    via r = dB ln10 / 20), ``input_covariance`` and ``input_mean`` (vacuum
    and zero when omitted).
    """
    from .cluster import graph_and_partition_from_json, build_cluster
    from .engine import MeasurementAngles

    graph, partition, ortho = graph_and_partition_from_json(doc)
    model = build_cluster(graph, ortho)
    angles_doc = doc.get("angles", {})
    try:
        angles = MeasurementAngles(
            theta_in=np.asarray(angles_doc.get("theta_in", []), dtype=float),
            theta_cluster=np.asarray(angles_doc.get("theta_cluster", []), dtype=float),
            local_oscillator_amplitude=float(angles_doc.get("local_oscillator_amplitude", 1.0)),
        )
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed angles section: {exc}") from exc
    r = float(doc.get("squeezing_db", 0.0)) * math.log(10.0) / 20.0
    m = partition.m
    if doc.get("input_covariance") is not None:
        cov = np.asarray(doc["input_covariance"], dtype=float)
    else:
        cov = VACUUM_VARIANCE * np.eye(2 * m)
    mean = np.asarray(doc.get("input_mean", np.zeros(2 * m)), dtype=float)
    return SchemeProgram(
        model=model,
        partition=partition,
        angles=angles,
        input_state=GaussianState(mean=mean, cov=cov),
        squeezing=r,
    )
