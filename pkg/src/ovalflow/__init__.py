"""Numerical toolkit for rotationally symmetric ancient Ricci flow on S^3.

The package builds and cross-checks the standard quantitative picture of such
flows at desk scale: the steady soliton profile and its arc-length form
(`bryant`), the nonlocal parabolic PDE for the profile F(z, t) of the sphere
of symmetry (`profile_pde`), parabolically rescaled cylindrical and tip frames
with the (alpha, beta, gamma) symmetry group (`rescale`), the tip-region
exponential weights and their Poincare inequality (`weights`),
Gaussian-weighted spectral tooling for the drift operator (`spectral`),
two-solution difference diagnostics down to the neutral-mode ODE residual
(`difference`), and a CSV-first command line driver (`cli`).
"""

from __future__ import annotations

__version__ = "0.1.0"
