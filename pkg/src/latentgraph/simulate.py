"""Ground-truth generators and scenario samplers for the benchmarks.

Two truth designs: a random geometric-graph precision matrix (inverse
rescaled to a correlation matrix) and a deterministic two-spike
correlation matrix. Four observation scenarios: (a) all-binary Gaussian,
(b) all-binary with +-5 latent outliers, (c) half continuous, (d) half
continuous through a cubic marginal transform.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .correlation import BINARY, CONTINUOUS, MixedDataset
from .spca import leading_eigenvector

logger = logging.getLogger(__name__)

SCENARIOS = ("a", "b", "c", "d")
DESIGNS = ("random_graph", "spiked")

_OUTLIERS_PER_ROW = 5
_OUTLIER_VALUE = 5.0
_MIN_EIG_TARGET = 0.1
_MIN_EIG_TOL = 1e-6


@dataclass
class ScenarioTruth:
    sigma: np.ndarray
    omega: np.ndarray
    edges: set[tuple[int, int]]
    v1: np.ndarray
    cutoffs: np.ndarray
    seed: int
    design: str
    coupling: float = 0.0  # off-diagonal magnitude of the pre-rescale precision
    info: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return self.sigma.shape[0]


@dataclass
class ScenarioSpec:
    scenario: str
    n: int
    d: int
    seed: int
    design: str = "random_graph"

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        if self.design not in DESIGNS:
            raise ValueError(f"design must be one of {DESIGNS}, got {self.design!r}")
        if self.n < 2:
            raise ValueError("need n >= 2")
        if self.d < 2:
            raise ValueError("need d >= 2")
        if self.scenario in ("c", "d") and self.d % 2 != 0:
            raise ValueError("mixed scenarios require an even number of columns")


def _edge_probabilities(z: np.ndarray, c1: float, form: str) -> np.ndarray:
    diff = z[:, None, :] - z[None, :, :]
    dist2 = np.sum(diff * diff, axis=-1)
    if form == "squared_distance":
        p = np.exp(-dist2 / (2.0 * c1)) / np.sqrt(2.0 * np.pi)
    elif form == "raw_distance":
        # literal printed form: grows with distance; kept selectable for comparison
        p = np.exp(np.sqrt(dist2) / (2.0 * c1)) / np.sqrt(2.0 * np.pi)
    else:
        raise ValueError(f"unknown edge probability form {form!r}")
    return np.clip(p, 0.0, 1.0)


def _coupling_by_bisection(adjacency: np.ndarray) -> float:
    """Largest t with lambda_min(I + t * adjacency) >= the 0.1 floor."""
    d = adjacency.shape[0]
    eye = np.eye(d)

    def min_eig(t):
        return float(np.linalg.eigvalsh(eye + t * adjacency)[0])

    lo, hi = 0.0, 1.0
    while min_eig(hi) > _MIN_EIG_TARGET:
        lo, hi = hi, 2.0 * hi
        if hi > 1e6:
            raise ArithmeticError("coupling bisection failed to bracket")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = min_eig(mid)
        if abs(val - _MIN_EIG_TARGET) <= _MIN_EIG_TOL:
            return mid
        if val > _MIN_EIG_TARGET:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _correlation_from_base_precision(omega0: np.ndarray):
    sigma0 = np.linalg.inv(omega0)
    scale = 1.0 / np.sqrt(np.diag(sigma0))
    sigma = sigma0 * np.outer(scale, scale)
    sigma = 0.5 * (sigma + sigma.T)
    np.fill_diagonal(sigma, 1.0)
    omega = np.linalg.inv(sigma)
    omega = 0.5 * (omega + omega.T)
    return sigma, omega


def random_graph_truth(
    d: int,
    c1: float = 3.0,
    seed: int = 0,
    edge_prob_form: str = "squared_distance",
) -> ScenarioTruth:
    """Random geometric-graph precision truth with unit-diagonal Sigma.

    Node locations are uniform on the unit square; edges are Bernoulli
    with probability decaying in squared distance. The common off-diagonal
    magnitude is the largest value keeping the base precision matrix
    comfortably positive definite.
    """
    if d < 2:
        raise ValueError("need d >= 2")
    if c1 <= 0:
        raise ValueError("c1 must be positive")
    attempt_seed = seed
    for _ in range(100):
        rng = np.random.default_rng(attempt_seed)
        z = rng.uniform(size=(d, 2))
        p = _edge_probabilities(z, c1, edge_prob_form)
        draws = rng.random((d, d))
        upper = np.triu(draws < p, k=1)
        adjacency = (upper | upper.T).astype(float)
        cutoffs = rng.uniform(-1.0, 1.0, size=d)
        if adjacency.any():
            break
        logger.warning("degenerate edge draw (no edges); redrawing with seed+1")
        attempt_seed += 1
    else:
        raise ArithmeticError("could not draw a nonempty graph")

    t = _coupling_by_bisection(adjacency)
    omega0 = np.eye(d) + t * adjacency
    sigma, omega = _correlation_from_base_precision(omega0)
    edges = {(i, j) for i, j in zip(*np.nonzero(np.triu(adjacency, k=1)))}
    edges = {(int(i), int(j)) for i, j in edges}
    return ScenarioTruth(
        sigma=sigma,
        omega=omega,
        edges=edges,
        v1=leading_eigenvector(sigma),
        cutoffs=cutoffs,
        seed=seed,
        design="random_graph",
        coupling=t,
        info={
            "c1": c1,
            "edge_prob_form": edge_prob_form,
            "n_edges": len(edges),
            "mean_degree": 2.0 * len(edges) / d,
            "base_min_eig": float(np.linalg.eigvalsh(omega0)[0]),
        },
    )


def spiked_truth(d: int, seed: int = 0) -> ScenarioTruth:
    """Two-spike correlation matrix: spikes of weight 5 and 4 on the first
    two blocks of ten coordinates, rescaled to unit diagonal."""
    if d < 20:
        raise ValueError("spiked design needs d >= 20")
    u1 = np.zeros(d)
    u1[:10] = 1.0 / np.sqrt(10.0)
    u2 = np.zeros(d)
    u2[10:20] = 1.0 / np.sqrt(10.0)
    base = np.eye(d) + 4.0 * np.outer(u1, u1) + 3.0 * np.outer(u2, u2)
    scale = 1.0 / np.sqrt(np.diag(base))
    sigma = base * np.outer(scale, scale)
    sigma = 0.5 * (sigma + sigma.T)
    np.fill_diagonal(sigma, 1.0)
    omega = np.linalg.inv(sigma)
    omega = 0.5 * (omega + omega.T)
    edges = {
        (int(i), int(j))
        for i, j in zip(*np.nonzero(np.triu(np.abs(omega) > 1e-10, k=1)))
    }
    cutoffs = np.random.default_rng(seed).uniform(-1.0, 1.0, size=d)
    return ScenarioTruth(
        sigma=sigma,
        omega=omega,
        edges=edges,
        v1=leading_eigenvector(sigma),
        cutoffs=cutoffs,
        seed=seed,
        design="spiked",
        info={"spike_weights": [5.0, 4.0], "support_size": 10},
    )


def _draw_latent(truth: ScenarioTruth, n: int, rng: np.random.Generator) -> np.ndarray:
    chol = np.linalg.cholesky(truth.sigma)
    return rng.standard_normal((n, truth.d)) @ chol.T


def sample_scenario(
    truth: ScenarioTruth, spec: ScenarioSpec, return_latent: bool = False
):
    """Draw one observed dataset for the given scenario.

    Scenarios (a) and (b) emit all-binary columns; (c) and (d) emit the
    first half continuous. Scenario (b) replaces 5 latent entries per row
    by +-5 before thresholding (positions without replacement, fair-coin
    signs) using a stream independent of the latent draw, so (a) and (b)
    with the same seed share the same underlying noise.
    """
    if truth.d != spec.d:
        raise ValueError(f"truth has d={truth.d} but spec asks for d={spec.d}")
    root = np.random.SeedSequence(spec.seed)
    latent_seq, outlier_seq = root.spawn(2)
    rng_latent = np.random.default_rng(latent_seq)
    z = _draw_latent(truth, spec.n, rng_latent)
    d = spec.d

    if spec.scenario in ("a", "b"):
        z_obs = z
        if spec.scenario == "b":
            rng_out = np.random.default_rng(outlier_seq)
            if d < _OUTLIERS_PER_ROW:
                raise ValueError("scenario (b) needs at least 5 columns")
            z_obs = z.copy()
            positions = rng_out.random((spec.n, d)).argsort(axis=1)[:, :_OUTLIERS_PER_ROW]
            signs = np.where(
                rng_out.random((spec.n, _OUTLIERS_PER_ROW)) < 0.5, -1.0, 1.0
            )
            rows = np.repeat(np.arange(spec.n), _OUTLIERS_PER_ROW)
            z_obs[rows, positions.ravel()] = (_OUTLIER_VALUE * signs).ravel()
        values = (z_obs > truth.cutoffs[None, :]).astype(float)
        types = [BINARY] * d
        latent = z_obs
    elif spec.scenario == "c":
        half = d // 2
        values = np.empty((spec.n, d))
        values[:, :half] = z[:, :half]
        values[:, half:] = (z[:, half:] > truth.cutoffs[None, half:]).astype(float)
        types = [CONTINUOUS] * half + [BINARY] * (d - half)
        latent = z
    else:  # scenario d: cubic marginal transform on every latent coordinate
        half = d // 2
        values = np.empty((spec.n, d))
        values[:, :half] = np.cbrt(z[:, :half])
        values[:, half:] = (z[:, half:] > truth.cutoffs[None, half:] ** 3).astype(float)
        types = [CONTINUOUS] * half + [BINARY] * (d - half)
        latent = z

    dataset = MixedDataset(values=values, column_types=types)
    return (dataset, latent) if return_latent else dataset


# ---------------------------------------------------------------------------
# CSV / JSON persistence of truth bundles and datasets


def write_matrix_csv(path, matrix, prefix: str = "c") -> None:
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    header = ",".join(f"{prefix}{j}" for j in range(matrix.shape[1]))
    np.savetxt(path, matrix, delimiter=",", header=header, comments="", fmt="%.17g")


def read_matrix_csv(path) -> np.ndarray:
    out = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return out


def save_truth(truth: ScenarioTruth, outdir) -> None:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    write_matrix_csv(outdir / "sigma.csv", truth.sigma)
    write_matrix_csv(outdir / "omega.csv", truth.omega)
    write_matrix_csv(outdir / "v1.csv", truth.v1.reshape(-1, 1), prefix="v")
    write_matrix_csv(outdir / "cutoffs.csv", truth.cutoffs.reshape(-1, 1), prefix="cutoff")


def load_truth(outdir, manifest: dict | None = None) -> ScenarioTruth:
    outdir = Path(outdir)
    if manifest is None:
        manifest = json.loads((outdir / "manifest.json").read_text())
    omega = read_matrix_csv(outdir / "omega.csv")
    edges = {
        (int(i), int(j))
        for i, j in zip(*np.nonzero(np.triu(np.abs(omega) > 1e-8, k=1)))
    }
    return ScenarioTruth(
        sigma=read_matrix_csv(outdir / "sigma.csv"),
        omega=omega,
        edges=edges,
        v1=read_matrix_csv(outdir / "v1.csv").ravel(),
        cutoffs=read_matrix_csv(outdir / "cutoffs.csv").ravel(),
        seed=int(manifest.get("seed", 0)),
        design=manifest.get("design", "random_graph"),
        coupling=float(manifest.get("coupling", 0.0)),
        info=manifest,
    )
