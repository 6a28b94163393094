import os

import numpy as np
import pytest

from dq_algebra import PureQuaternion, UnitQuaternion, pose_from
from kinematics import load_chain

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CHAINS_DIR = os.path.join(REPO_ROOT, 'chains')
SCENARIOS_DIR = os.path.join(REPO_ROOT, 'scenarios')
LBR4_PATH = os.path.join(CHAINS_DIR, 'kuka_lbr4.dh')
PLANAR_PATH = os.path.join(CHAINS_DIR, 'planar_2link.dh')

Q_HOME = np.array([0.1, 0.6, -0.2, -1.2, 0.3, 0.8, 0.1])


def random_pose(rng, scale=1.0):
    r = UnitQuaternion.normalized(rng.normal(size=4))
    p = PureQuaternion(*(scale * rng.normal(size=3)))
    return pose_from(r, p)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def lbr4():
    return load_chain(LBR4_PATH)


@pytest.fixture
def planar():
    return load_chain(PLANAR_PATH)
