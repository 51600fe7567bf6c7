import numpy as np
import pytest

from unlearn_forge import data, models
from unlearn_forge.numcore import rng_stream


def make_blobs(seed=0, K=3, per_class=30, d=5, spread=1.0, subgroups=1):
    return data.gen_blobs(K, per_class, d, spread, subgroups, rng_stream(seed, 10))


def random_model(rng, kind="logistic", d=4, K=3, l2=1e-2, hidden=8):
    m = models.init_model(kind, d, K, l2, hidden)
    return m.with_theta(rng.standard_normal(m.theta.size))


def newton_instance(seed=0, K=3, d=3, per_class=20, spread=1.5, l2=1e-2, fraction=0.2):
    """Convex instance with exactly stationary theta_tr / theta_r."""
    rng = rng_stream(seed, 100)
    ds = data.gen_blobs(K, per_class, d, spread, 1, rng)
    split = data.split_random(ds, fraction, rng)
    retain = ds.subset(split.retain_idx)
    forget = ds.subset(split.forget_idx)
    template = models.init_model("logistic", d, K, l2)
    theta_tr = models.newton_optimize(template, ds.X, models.onehot(ds.y, K))
    theta_r = models.newton_optimize(template, retain.X, models.onehot(retain.y, K))
    return theta_tr, theta_r, ds, retain, forget, split


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
