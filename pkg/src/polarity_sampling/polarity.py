"""Polarity sampling: reweight a generator's latent prior by Jacobian volume.

Pool construction draws N latents, records each one's region log-volume
(sum of log top-k singular values of the local slope matrix), and the
samplers then resample those latents under softmax(rho * log_volume):
rho < 0 concentrates on the output-density modes (small Jacobian volume),
rho > 0 on the anti-modes, rho = 0 reproduces the prior.
"""

import hashlib
import json
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from . import cpa
from .errors import ConfigError, InputError, SamplingTimeout, StateError, ValidationError
from .spectral import DEFAULT_EPS, batch_top_k_singular_values

POOL_FORMAT_VERSION = 1
_STALL_LIMIT = 10_000_000


# --- latent domains ----------------------------------------------------------


@dataclass(frozen=True)
class LatentDomain:
    """Latent prior: a uniform box or an axis-aligned gaussian.

    A gaussian domain may carry a truncation factor psi in (0, 1]; sampling
    then rejects outside the centered box mean +- psi * 2 * std (the
    truncation baseline's support).
    """

    kind: str                      # "uniform_box" | "gaussian"
    lo: np.ndarray = None          # box only
    hi: np.ndarray = None
    mean: np.ndarray = None        # gaussian only
    std: np.ndarray = None
    psi: float = None              # gaussian truncation, optional

    def __post_init__(self):
        if self.kind == "uniform_box":
            lo = np.asarray(self.lo, dtype=np.float64).reshape(-1)
            hi = np.asarray(self.hi, dtype=np.float64).reshape(-1)
            if lo.size != hi.size or np.any(lo >= hi):
                raise InputError("uniform_box needs lo < hi per dimension")
            if self.psi is not None:
                raise InputError("truncation is defined for gaussian domains only")
            object.__setattr__(self, "lo", lo)
            object.__setattr__(self, "hi", hi)
        elif self.kind == "gaussian":
            mean = np.asarray(self.mean, dtype=np.float64).reshape(-1)
            std = np.asarray(self.std, dtype=np.float64).reshape(-1)
            if mean.size != std.size or np.any(std <= 0):
                raise InputError("gaussian needs std > 0 per dimension")
            if self.psi is not None and not (0.0 < self.psi <= 1.0):
                raise InputError("psi must lie in (0, 1]")
            object.__setattr__(self, "mean", mean)
            object.__setattr__(self, "std", std)
        else:
            raise InputError(f"unknown domain kind {self.kind!r}")

    @property
    def dim(self):
        return (self.lo if self.kind == "uniform_box" else self.mean).size

    @property
    def volume(self):
        if self.kind != "uniform_box":
            raise InputError("volume is defined for box domains only")
        return float(np.prod(self.hi - self.lo))

    def contains(self, z, atol=0.0):
        z = np.atleast_2d(np.asarray(z, dtype=np.float64))
        if self.kind == "uniform_box":
            return np.all((z >= self.lo - atol) & (z <= self.hi + atol), axis=1)
        if self.psi is None:
            return np.ones(z.shape[0], dtype=bool)
        half = self.psi * 2.0 * self.std
        return np.all(np.abs(z - self.mean) <= half + atol, axis=1)

    def sample(self, n, rng):
        if self.kind == "uniform_box":
            return rng.uniform(self.lo, self.hi, size=(n, self.dim))
        if self.psi is None:
            return self.mean + self.std * rng.standard_normal((n, self.dim))
        # truncated gaussian via rejection onto the psi-box
        out = np.empty((n, self.dim))
        filled = 0
        while filled < n:
            cand = self.mean + self.std * rng.standard_normal((max(n, 256), self.dim))
            cand = cand[self.contains(cand)]
            take = min(n - filled, cand.shape[0])
            out[filled : filled + take] = cand[:take]
            filled += take
        return out

    def truncate(self, psi):
        if self.kind != "gaussian":
            raise InputError(
                "truncation baseline is defined for gaussian priors only"
            )
        return LatentDomain("gaussian", mean=self.mean, std=self.std, psi=psi)

    def to_dict(self):
        if self.kind == "uniform_box":
            return {"kind": self.kind, "lo": list(self.lo), "hi": list(self.hi)}
        d = {"kind": self.kind, "mean": list(self.mean), "std": list(self.std)}
        if self.psi is not None:
            d["psi"] = self.psi
        return d

    @staticmethod
    def from_dict(d):
        kind = d.get("kind")
        if kind == "uniform_box":
            return LatentDomain(kind, lo=d["lo"], hi=d["hi"])
        if kind == "gaussian":
            return LatentDomain(kind, mean=d["mean"], std=d["std"], psi=d.get("psi"))
        raise ConfigError(f"unknown domain kind {kind!r}")


def truncation_sample(domain, psi, s, seed):
    """Truncation baseline: gaussian prior restricted to mean +- psi * 2 * std."""
    if s < 1:
        raise InputError("need at least one sample")
    return domain.truncate(psi).sample(s, np.random.default_rng(seed))


# --- pools -------------------------------------------------------------------


@dataclass(frozen=True)
class RegionRecord:
    z: np.ndarray
    code_hash: str
    log_volume: float
    top_sigma: np.ndarray = None  # optional diagnostics

    def __post_init__(self):
        if not np.isfinite(self.log_volume):
            raise ValidationError("record log_volume must be finite")


@dataclass(frozen=True)
class SamplePool:
    """N candidate latents with precomputed region log-volumes."""

    records: tuple
    k: int
    eps: float
    space: str            # "output" or "composed:<feature net name>"
    seed: int
    domain: LatentDomain
    net_fingerprint: str
    version: int = POOL_FORMAT_VERSION
    _log_volumes: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def n(self):
        return len(self.records)

    @property
    def log_volumes(self):
        if self._log_volumes is None:
            object.__setattr__(
                self,
                "_log_volumes",
                np.array([r.log_volume for r in self.records]),
            )
        return self._log_volumes

    @property
    def latents(self):
        return np.stack([r.z for r in self.records])

    def distinct_code_count(self):
        """How many distinct regions the pool has discovered (coverage diagnostic)."""
        return len({r.code_hash for r in self.records})

    def save(self, path):
        doc = {
            "version": self.version,
            "net_fingerprint": self.net_fingerprint,
            "domain": self.domain.to_dict(),
            "n": self.n,
            "k": self.k,
            "eps": self.eps,
            "space": self.space,
            "seed": self.seed,
            "records": [
                {
                    "z": [float(v) for v in r.z],
                    "code_hash": r.code_hash,
                    "log_volume": float(r.log_volume),
                    **(
                        {"top_sigma": [float(v) for v in r.top_sigma]}
                        if r.top_sigma is not None
                        else {}
                    ),
                }
                for r in self.records
            ],
        }
        with open(path, "w") as fh:
            json.dump(doc, fh)
            fh.write("\n")

    @staticmethod
    def load(path):
        if not os.path.exists(path):
            raise ConfigError(f"pool file not found: {path}")
        with open(path) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValidationError(
                    f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}"
                ) from exc
        if doc.get("version") != POOL_FORMAT_VERSION:
            raise ValidationError(
                f"{path}: unsupported pool format version {doc.get('version')!r}"
            )
        records = tuple(
            RegionRecord(
                z=np.array(r["z"], dtype=np.float64),
                code_hash=r["code_hash"],
                log_volume=float(r["log_volume"]),
                top_sigma=(
                    np.array(r["top_sigma"]) if "top_sigma" in r else None
                ),
            )
            for r in doc["records"]
        )
        if len(records) != doc["n"]:
            raise ValidationError(f"{path}: record count disagrees with header")
        return SamplePool(
            records=records,
            k=int(doc["k"]),
            eps=float(doc["eps"]),
            space=doc["space"],
            seed=int(doc["seed"]),
            domain=LatentDomain.from_dict(doc["domain"]),
            net_fingerprint=doc["net_fingerprint"],
        )

    def check_fingerprint(self, net):
        fp = cpa.fingerprint(net)
        if fp != self.net_fingerprint:
            raise ConfigError(
                f"pool was built for model {self.net_fingerprint[:12]}..., "
                f"supplied model hashes to {fp[:12]}..."
            )


def _effective_net(net, space, feature_net):
    if space == "output":
        return net
    if space.startswith("composed"):
        if feature_net is None:
            raise ConfigError(
                f"pool space {space!r} requires the matching feature network"
            )
        return cpa.compose(net, feature_net)
    raise ConfigError(f"unknown space {space!r}")


def region_log_volumes(net, zs, k, eps=DEFAULT_EPS):
    """Batched per-latent scores: top-k spectra and their log-volumes."""
    A, _ = cpa.affine_maps(net, zs)
    sigmas = batch_top_k_singular_values(A, k)
    return np.sum(np.log(sigmas + eps), axis=1), sigmas


def build_pool(net, domain, n, k, seed, space="output", feature_net=None,
               eps=DEFAULT_EPS, keep_spectra=True, chunk=8192):
    """Draw n latents i.i.d. from the domain and score each one's region.

    Deterministic given the seed; pool construction and later sampling use
    independent RNG streams, so the pool is reusable across sample sizes.
    """
    if n < 1:
        raise InputError("pool size must be at least 1")
    eff = _effective_net(net, space, feature_net)
    if domain.dim != eff.input_dim:
        raise InputError(
            f"domain dim {domain.dim} does not match network input {eff.input_dim}"
        )
    if not (1 <= k <= min(eff.output_dim, eff.input_dim)):
        raise InputError(
            f"k={k} outside [1, {min(eff.output_dim, eff.input_dim)}] for this space"
        )
    rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])
    records = []
    for start in range(0, n, chunk):
        zs = domain.sample(min(chunk, n - start), rng)
        lvs, sigmas = region_log_volumes(eff, zs, k, eps)
        codes = cpa.region_codes(eff, zs)
        for i in range(zs.shape[0]):
            records.append(
                RegionRecord(
                    z=zs[i],
                    code_hash=cpa.ActivationCode(codes[i]).digest,
                    log_volume=float(lvs[i]),
                    top_sigma=sigmas[i].copy() if keep_spectra else None,
                )
            )
    return SamplePool(
        records=tuple(records),
        k=k,
        eps=eps,
        space=space,
        seed=seed,
        domain=domain,
        net_fingerprint=cpa.fingerprint(net),
    )


# --- samplers ----------------------------------------------------------------


def polarity_weights(pool, rho):
    """Categorical weights softmax(rho * log_volumes), computed in log-space."""
    if pool.n == 0:
        raise StateError("empty pool")
    if not np.isfinite(rho):
        raise InputError("rho must be finite")
    scores = rho * pool.log_volumes
    scores -= scores.max()
    w = np.exp(scores)
    return w / w.sum()


@dataclass(frozen=True)
class PolaritySampler:
    """A frozen pool bound to one polarity value."""

    pool: SamplePool
    rho: float
    weights: np.ndarray = None

    def __post_init__(self):
        if self.weights is None:
            object.__setattr__(self, "weights", polarity_weights(self.pool, self.rho))

    def draw(self, s, seed):
        return sample_batch(self, s, seed)


def sample_batch(sampler, s, seed):
    """S categorical draws (with replacement) from the pool latents."""
    if s < 1:
        raise InputError("need at least one sample")
    rng = np.random.default_rng(seed)
    idx = rng.choice(sampler.pool.n, size=s, p=sampler.weights)
    return sampler.pool.latents[idx]


class OnlineSampler:
    """Rejection sampling against the pool's weight scale, no pool lookup.

    Fresh candidates come straight from the prior; each one's Jacobian
    spectrum is computed on the fly.  Variants:

    * ``max_normalized`` (default): accept with probability w_z / w_max where
      w_max is the largest pool weight; acceptance is exactly proportional
      to w_z, i.e. textbook rejection sampling for the target density.
    * ``paper_faithful``: accept when w_z / (w_z + sum_i w_i) >= alpha with
      alpha ~ U[0,1]; kept for comparison, its acceptance rate shrinks with
      pool size.
    """

    def __init__(self, pool, net, rho, seed, variant="max_normalized",
                 feature_net=None):
        if pool.n == 0:
            raise StateError("empty pool")
        if variant not in ("max_normalized", "paper_faithful"):
            raise InputError(f"unknown online variant {variant!r}")
        self.pool = pool
        self.net = _effective_net(net, pool.space, feature_net)
        self.rho = float(rho)
        self.variant = variant
        self.rng = np.random.default_rng(seed)
        pool_scores = rho * pool.log_volumes
        self._log_wmax = float(pool_scores.max())
        self._log_wsum = float(logsumexp(pool_scores))
        self._proposed = 0
        self._accepted = 0

    def draw(self, s, chunk=4096):
        out = np.empty((s, self.pool.domain.dim))
        filled = 0
        rejections = 0
        while filled < s:
            zs = self.pool.domain.sample(chunk, self.rng)
            lw = self.rho * region_log_volumes(
                self.net, zs, self.pool.k, self.pool.eps
            )[0]
            alpha = self.rng.uniform(size=chunk)
            if self.variant == "max_normalized":
                accept = alpha < np.exp(np.minimum(lw - self._log_wmax, 0.0))
            else:
                # log of w_z / (w_z + sum_pool w_i)
                denom = np.logaddexp(lw, self._log_wsum)
                accept = (lw - denom) >= np.log(np.maximum(alpha, 1e-300))
            took = zs[accept]
            take = min(s - filled, took.shape[0])
            out[filled : filled + take] = took[:take]
            filled += take
            self._proposed += chunk
            self._accepted += int(accept.sum())
            rejections += int(chunk - accept.sum())
            if rejections >= _STALL_LIMIT and filled < s:
                raise SamplingTimeout(
                    rejections, self._accepted / max(self._proposed, 1)
                )
        return out

    @property
    def acceptance_rate(self):
        return self._accepted / max(self._proposed, 1)


def sample_online(pool, net, rho, seed, variant="max_normalized", feature_net=None):
    """One accepted latent from the online rejection sampler."""
    return OnlineSampler(pool, net, rho, seed, variant, feature_net).draw(1)[0]
