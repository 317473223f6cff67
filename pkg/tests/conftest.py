import numpy as np
import pytest

from steerlab import assemblage as am
from steerlab import matcore


def rand_complex(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def rand_psd(rng, d=2, rank=None):
    g = rand_complex(rng, (d, rank or d))
    return g @ g.conj().T


def rand_density(rng, d=2):
    a = rand_psd(rng, d)
    return a / np.trace(a).real


def rand_projective_meas(rng, m=2):
    """m random orthonormal rank-1 qubit POVMs."""
    povms = []
    for _ in range(m):
        q, r = np.linalg.qr(rand_complex(rng, (2, 2)))
        q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
        povms.append((matcore.projector(q[:, 0]), matcore.projector(q[:, 1])))
    return am.MeasurementSet(tuple(povms))


def rand_assemblage(rng, m=2, pure=False):
    """Valid random assemblage from a two-qubit state and random
    projective measurements."""
    if pure:
        v = rand_complex(rng, 4)
        state = matcore.projector(v / np.linalg.norm(v))
    else:
        state = rand_density(rng, 4)
    return am.from_state(state, rand_projective_meas(rng, m))


def rand_product_assemblage(rng, m=2, o=2):
    """Unsteerable by construction: sigma_{a|x} = P(a|x) * rho."""
    rho = rand_density(rng, 2)
    probs = rng.random((m, o))
    probs /= probs.sum(axis=1, keepdims=True)
    c = np.array([[probs[x, a] * rho for x in range(m)] for a in range(o)])
    return am.Assemblage(c)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
