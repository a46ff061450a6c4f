import numpy as np
import pytest

from inertial_modes import basis as bm
from inertial_modes import galerkin as gk
from inertial_modes.oracle import frequency_polynomial, oracle_eigenvalues

from conftest import BALL, EZ, TILTED, TRIAXIAL


def test_rigid_rotation_polynomial():
    q = frequency_polynomial(gk.block_pencil(BALL, EZ, 1))
    # lam (lam^2 - 1/4) up to scale
    assert [int(q[k]) for k in range(4)] == [0, -1, 0, 4]


@pytest.mark.parametrize("E,O", [(BALL, EZ), (TRIAXIAL, TILTED)])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_structured_solver_matches_oracle(E, O, n):
    p = gk.block_pencil(E, O, n)
    ref = np.array(oracle_eigenvalues(p))
    got = gk.solve_pencil(p).eigenvalues
    assert len(ref) == len(got) == bm.dim_block(n)
    assert np.max(np.abs(ref - got)) < 1e-10
