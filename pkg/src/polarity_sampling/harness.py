"""Desk-scale experiment sweeps with reproducible seeds and CSV output.

Each grid point gets its own child seed derived from (master seed,
component name, grid indices), so grids can be resized without perturbing
other points.  Sample-draw seeds deliberately do not depend on the rho
index: on a single-region network every rho then reuses the same draws,
making "polarity off" and "rho = 0" bit-identical.
"""

import csv
import hashlib
import json
import os
from dataclasses import dataclass, field, asdict

import numpy as np

from . import cpa
from .errors import ConfigError
from .metrics import (
    DomainSampler, SampleSet, frechet_distance, nn_distances, nn_summary,
    path_length, precision_recall,
)
from .polarity import (
    LatentDomain, PolaritySampler, build_pool, sample_batch,
)
from .spectral import DEFAULT_EPS
from .synth import SyntheticDataset


def child_seed(master, label, *indices):
    """Deterministic sub-seed for one component at one grid point."""
    key = f"{master}/{label}/" + "/".join(str(i) for i in indices)
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "big") >> 1


@dataclass
class ExperimentConfig:
    model_path: str
    domain: dict
    seed: int
    rho_grid: list
    feature_model_path: str = None
    n: int = 200_000          # pool size; shrink for quick runs
    k: int = 30               # top-k singular values
    eps: float = DEFAULT_EPS
    psi_grid: list = field(default_factory=lambda: [1.0])
    s: int = 2000             # samples drawn per grid point
    k_nn: int = 3
    j: int = 3
    epsilon: float = 1e-4     # path-length interpolation step
    n_pairs: int = 1000
    m_top: int = 16           # latents reported by the modes command
    reference: dict = None
    reference_biased: dict = None
    reference_uniform: dict = None
    n_grid: list = None
    k_grid: list = None
    resolution: int = 64

    def __post_init__(self):
        if not self.rho_grid:
            raise ConfigError("rho grid must be nonempty")
        if not self.psi_grid:
            raise ConfigError("psi grid must be nonempty")
        if self.s < 1:
            raise ConfigError("sample count S must be at least 1")
        if not os.path.exists(self.model_path):
            raise ConfigError(f"model file not found: {self.model_path}")
        if self.feature_model_path and not os.path.exists(self.feature_model_path):
            raise ConfigError(
                f"feature model file not found: {self.feature_model_path}"
            )

    def to_json(self, path=None):
        doc = {k: v for k, v in asdict(self).items() if v is not None}
        text = json.dumps(doc, indent=1, sort_keys=True)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text

    @staticmethod
    def from_json(path):
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}")
        with open(path) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(
                    f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}"
                ) from exc
        try:
            return ExperimentConfig(**doc)
        except TypeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc

    # --- loaded resources ---

    def load_net(self):
        return cpa.load_model(self.model_path)

    def load_feature_net(self):
        if self.feature_model_path is None:
            return None
        return cpa.load_model(self.feature_model_path)

    def load_domain(self):
        return LatentDomain.from_dict(self.domain)

    def load_reference(self, which="reference"):
        spec = getattr(self, which)
        if spec is None:
            raise ConfigError(f"config is missing the {which!r} dataset")
        return SyntheticDataset.from_dict(spec).sample()

    @property
    def space(self):
        if self.feature_model_path is None:
            return "output"
        return f"composed:{os.path.basename(self.feature_model_path)}"


def write_csv(path, header, rows):
    """CSV with repr-formatted floats: byte-identical across identical runs."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)
                 for v in row]
            )


def _pool_for(config, net, feature_net, domain, seed):
    return build_pool(
        net, domain, config.n, config.k, seed, space=config.space,
        feature_net=feature_net, eps=config.eps, keep_spectra=False,
    )


def _generate(config, net, pool, rho, seed):
    zs = sample_batch(PolaritySampler(pool, rho), config.s, seed)
    return np.atleast_2d(cpa.forward(net, zs))


def run_pareto(config):
    """(rho, psi) sweep of precision/recall/Fréchet against the reference set."""
    net = config.load_net()
    feature_net = config.load_feature_net()
    base_domain = config.load_domain()
    reference = SampleSet(config.load_reference(), "reference")
    rows = []
    for i_psi, psi in enumerate(config.psi_grid):
        domain = base_domain if psi == 1.0 else base_domain.truncate(psi)
        pool = _pool_for(config, net, feature_net, domain,
                         child_seed(config.seed, "pool", i_psi))
        draw_seed = child_seed(config.seed, "sample", i_psi)
        for rho in config.rho_grid:
            fake = SampleSet(_generate(config, net, pool, rho, draw_seed), "generated")
            prec, rec = precision_recall(reference, fake, config.k_nn)
            fd = frechet_distance(reference, fake)
            rows.append((float(rho), float(psi), float(prec), float(rec),
                         float(fd), config.seed))
    return ["rho", "psi", "precision", "recall", "frechet", "seed"], rows


def run_ablation(config):
    """Metrics across the (N, k) pool-construction grid, at the first rho."""
    if not config.n_grid or not config.k_grid:
        raise ConfigError("ablation needs nonempty n_grid and k_grid")
    net = config.load_net()
    feature_net = config.load_feature_net()
    domain = config.load_domain()
    reference = SampleSet(config.load_reference(), "reference")
    rho = config.rho_grid[0]
    rows = []
    for i_n, n in enumerate(config.n_grid):
        for i_k, k in enumerate(config.k_grid):
            pool = build_pool(
                net, domain, int(n), int(k),
                child_seed(config.seed, "ablate_pool", i_n, i_k),
                space=config.space, feature_net=feature_net, eps=config.eps,
                keep_spectra=False,
            )
            fake = SampleSet(
                _generate(config, net, pool, rho,
                          child_seed(config.seed, "ablate_sample", i_n, i_k)),
                "generated",
            )
            prec, rec = precision_recall(reference, fake, config.k_nn)
            fd = frechet_distance(reference, fake)
            rows.append((int(n), int(k), float(fd), float(prec), float(rec),
                         config.seed))
    return ["n", "k", "frechet", "precision", "recall", "seed"], rows


def run_modes(config, rho_extreme=None):
    """Report the highest-weight pool latents, their outputs, and NN distances."""
    net = config.load_net()
    feature_net = config.load_feature_net()
    domain = config.load_domain()
    rho = config.rho_grid[0] if rho_extreme is None else rho_extreme
    pool = _pool_for(config, net, feature_net, domain,
                     child_seed(config.seed, "pool", 0))
    sampler = PolaritySampler(pool, rho)
    order = np.argsort(-sampler.weights, kind="stable")[: config.m_top]
    latents = pool.latents[order]
    outputs = np.atleast_2d(cpa.forward(net, latents))
    report = {
        "rho": float(rho),
        "seed": config.seed,
        "latents": latents.tolist(),
        "outputs": outputs.tolist(),
        "weights": sampler.weights[order].tolist(),
    }
    if config.reference is not None:
        dists = nn_distances(
            SampleSet(outputs, "modes"),
            SampleSet(config.load_reference(), "reference"),
            config.j,
        )
        report["nn_distances"] = dists.tolist()
        report["nn_summary"] = nn_summary(dists)
    return report


def run_shift(config):
    """Fréchet distance to a biased and an unbiased reference across rho."""
    net = config.load_net()
    feature_net = config.load_feature_net()
    domain = config.load_domain()
    biased = SampleSet(config.load_reference("reference_biased"), "biased")
    uniform = SampleSet(config.load_reference("reference_uniform"), "uniform")
    if biased.dim != uniform.dim:
        raise ConfigError("shift references live in different spaces")
    pool = _pool_for(config, net, feature_net, domain,
                     child_seed(config.seed, "pool", 0))
    draw_seed = child_seed(config.seed, "sample", 0)
    rows = []
    for rho in config.rho_grid:
        fake = SampleSet(_generate(config, net, pool, rho, draw_seed), "generated")
        rows.append((float(rho), float(frechet_distance(biased, fake)),
                     float(frechet_distance(uniform, fake)), config.seed))
    return ["rho", "frechet_biased", "frechet_uniform", "seed"], rows


def run_ppl(config):
    """Path-length distribution per rho, endpoints drawn by the polarity sampler."""
    net = config.load_net()
    feature_net = config.load_feature_net()
    domain = config.load_domain()
    pool = _pool_for(config, net, feature_net, domain,
                     child_seed(config.seed, "pool", 0))
    rows = []
    for i_rho, rho in enumerate(config.rho_grid):
        res = path_length(
            net, PolaritySampler(pool, rho), config.epsilon, config.n_pairs,
            child_seed(config.seed, "ppl", i_rho), feature_net=feature_net,
        )
        rows.append((float(rho), res.mean, res.quantiles[0.1],
                     res.quantiles[0.5], res.quantiles[0.9], config.seed))
    return ["rho", "mean_ppl", "q10", "q50", "q90", "seed"], rows
