"""Shared fixtures: synthetic camera pairs and small hand-built inputs."""

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from app.services.synthetic import make_scene


def random_rotation(seed: int) -> np.ndarray:
    return Rotation.random(random_state=seed).as_matrix()


def rotation_about(axis, degrees: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    return Rotation.from_rotvec(np.radians(degrees) * axis / np.linalg.norm(axis)).as_matrix()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def noiseless_pair():
    """(scene, correspondences) with f1 = 1000 and f2 = 1300, no image noise"""
    return make_scene(n_points=150, f1=1000.0, f2=1300.0, sigma=0.0, seed=7)


@pytest.fixture
def noisy_pair():
    return make_scene(n_points=200, f1=900.0, f2=1200.0, sigma=0.5, seed=11)


@pytest.fixture
def conditioned_f(noiseless_pair):
    """F of the noiseless pair in coordinates scaled by the RMS point radius"""
    scene, corrs = noiseless_pair
    pts = np.vstack([corrs.x1, corrs.x2])
    s = np.sqrt(np.mean(np.sum(pts**2, axis=1)))
    T = np.diag([s, s, 1.0])
    F = T @ scene.fundamental @ T
    return F / np.linalg.norm(F)
