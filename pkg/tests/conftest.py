"""Shared fixtures: the steady-profile table and arc-length curve are
expensive enough to build once per session and are consumed by most modules.
"""

from __future__ import annotations

import pytest

from ovalflow import bryant


@pytest.fixture(scope="session")
def phi_table():
    return bryant.solve_phi(r_max=50.0, dr=1e-3)


@pytest.fixture(scope="session")
def b_curve(phi_table):
    return bryant.arc_length_profile(phi_table, z_max=60.0)
