"""Small constructed generators with known region geometry.

These are the desk-scale stand-ins for pretrained models: every network
here has hand-computable slopes, so sampler and density behavior can be
checked against closed forms.
"""

import numpy as np

from .cpa import CpaNetwork, Layer, identity_net
from .polarity import LatentDomain


def two_piece_net():
    """1-D map: slope 2 on z < 0, slope 1/2 on z >= 0 (G(z) = 0.5 relu(z) - 2 relu(-z))."""
    return CpaNetwork(
        name="two_piece",
        layers=(
            Layer(np.array([[1.0], [-1.0]]), np.zeros(2), "relu"),
            Layer(np.array([[0.5, -2.0]]), np.zeros(1)),
        ),
    )


def two_piece_domain():
    return LatentDomain("uniform_box", lo=[-1.0], hi=[1.0])


def ramp_2d_net():
    """2-D two-region map on the box [-1,1] x [0,2].

    First coordinate has slope 1/2 for z1 < 0 and 2 for z1 >= 0 (leaky unit
    times 2); second coordinate passes through.  Only two activation codes
    are realizable on the domain because z2 stays positive.
    """
    return CpaNetwork(
        name="ramp_2d",
        layers=(
            Layer(np.eye(2), np.zeros(2), "leaky_relu", alpha=0.25),
            Layer(np.diag([2.0, 1.0]), np.zeros(2)),
        ),
    )


def ramp_2d_domain():
    return LatentDomain("uniform_box", lo=[-1.0, 0.0], hi=[1.0, 2.0])


def halfspace_net():
    """R^2 -> R with a single relu unit; partition is the hyperplane z1 = 0."""
    return CpaNetwork(
        name="halfspace",
        layers=(
            Layer(np.array([[1.0, 0.0]]), np.zeros(1), "relu"),
            Layer(np.array([[1.0]]), np.zeros(1)),
        ),
    )


def abs_net():
    """Non-injective 1-D map G(z) = |z|; both regions image onto [0, 1]."""
    return CpaNetwork(
        name="abs",
        layers=(
            Layer(np.array([[1.0], [-1.0]]), np.zeros(2), "relu"),
            Layer(np.array([[1.0, 1.0]]), np.zeros(1)),
        ),
    )


def bimodal_generator():
    """1-D generator with a tight mode region and a wide anti-mode region.

    z < 0 maps to 0.1 z - 3 (slope 0.1: a dense cluster at -3); z >= 0 maps
    to 4 z - 3 (slope 4: a sparse spread across the rest of the line).
    """
    return CpaNetwork(
        name="bimodal",
        layers=(
            Layer(np.array([[1.0], [-1.0]]), np.zeros(2), "relu"),
            Layer(np.array([[4.0, -0.1]]), np.array([-3.0])),
        ),
    )


def bimodal_domain():
    return LatentDomain("gaussian", mean=[0.0], std=[1.0])


def bimodal_reference(size, seed):
    """Two tight clusters, one under each region's image."""
    from .synth import SyntheticDataset

    return SyntheticDataset(
        "gaussian_mixture",
        {"weights": [0.5, 0.5], "means": [[-3.0], [1.0]], "covs": [0.0025, 0.0025]},
        size,
        seed,
    )


def shift_generator():
    """Biased generator: 80% of the prior mass lands on a slope-1/2 region.

    G(z) = 0.5 z + 1.5 relu(z - 0.6) on z ~ U[-1, 1]: slope 1/2 below the
    knee at 0.6 (prior mass 0.8), slope 2 above it (mass 0.2).  Region
    weights sigma^rho rebalance the two branches to 50/50 at rho = 1.
    """
    return CpaNetwork(
        name="shift",
        layers=(
            Layer(np.array([[1.0], [-1.0], [1.0]]), np.array([0.0, 0.0, -0.6]), "relu"),
            Layer(np.array([[0.5, -0.5, 1.5]]), np.zeros(1)),
        ),
    )


def shift_domain():
    return LatentDomain("uniform_box", lo=[-1.0], hi=[1.0])


def shift_references(size, seed):
    """(biased, uniform) reference pair for the distribution-shift study.

    The biased reference matches the generator's rho = 0 output moments;
    the uniform one matches the uniform-on-image distribution reached at
    rho = 1.  Fréchet distance only sees means and covariances, so single
    gaussians with those moments suffice.
    """
    from .synth import SyntheticDataset

    biased = SyntheticDataset(
        "gaussian_mixture",
        {"weights": [1.0], "means": [[0.06]], "covs": [0.15566399999999998]},
        size,
        seed,
    )
    uniform = SyntheticDataset(
        "gaussian_mixture",
        {"weights": [1.0], "means": [[0.3]], "covs": [1.6**2 / 12.0]},
        size,
        seed + 1,
    )
    return biased, uniform


def random_net(seed, input_dim=None, max_width=32, max_depth=4):
    """Random mixed-activation CPA net for property tests."""
    rng = np.random.default_rng(seed)
    k = input_dim or int(rng.integers(1, 9))
    depth = int(rng.integers(1, max_depth + 1))
    layers = []
    d_in = k
    for i in range(depth):
        d_out = int(rng.integers(1, max_width + 1))
        act = rng.choice(["relu", "leaky_relu", "identity"])
        layers.append(
            Layer(
                rng.standard_normal((d_out, d_in)) / np.sqrt(d_in),
                0.1 * rng.standard_normal(d_out),
                str(act),
                alpha=0.2 if act == "leaky_relu" else 0.0,
            )
        )
        d_in = d_out
    return CpaNetwork(name=f"random_{seed}", layers=tuple(layers))


__all__ = [
    "two_piece_net", "two_piece_domain", "ramp_2d_net", "ramp_2d_domain",
    "halfspace_net", "abs_net", "bimodal_generator", "bimodal_domain",
    "bimodal_reference", "shift_generator", "shift_domain",
    "shift_references", "random_net", "identity_net",
]
