"""Monodromy of circle solutions: period shift versus the algebraic formula.

The direct route shifts time by one period.  The algebraic route rebuilds the
same function from boundary data and half-power products alone, and the two
are compared on a grid; their agreement is the main certificate of the
explicit monodromy representation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circle import (
    BoundaryValues,
    CircleFunction,
    boundary_values,
    continue_riccati_path,
    half_power_factors,
    riccati_circle_residual,
)
from .errors import DenominatorVanished, WindowTooSmall
from .phase import PhasePath

DENOMINATOR_FLOOR = 1e-10


def monodromy_direct(path: PhasePath) -> CircleFunction:
    """Phi_M(e^{i omega t}) = e^{i phi(t + T)} on the lifted circle."""
    T = path.params.T
    if path.t_max < 1.5 * T or path.t_min > -0.5 * T:
        raise WindowTooSmall(
            "monodromy_direct needs the window to cover [-T/2, 3T/2]; "
            f"got [{path.t_min}, {path.t_max}]"
        )
    return CircleFunction("PhiM", path, lambda t: np.exp(1j * path.phi(t + T)))


def monodromy_direct_sqrt(path: PhasePath) -> CircleFunction:
    """Half power of the shifted solution on the same continuous branch."""
    T = path.params.T
    return CircleFunction("PhiMSqrt", path, lambda t: np.exp(0.5j * path.phi(t + T)))


def _algebraic_coefficients(bv: BoundaryValues):
    """Constants of the explicit monodromy formula.

    The cosine coefficient is cos(phi(T/2)) - evaluating the formula at the
    cut edge e^{-i pi} forces this value (any half-angle variant breaks the
    boundary identity Phi_M(e^{-i pi}) = Phi(e^{i pi})).
    """
    c_plus = np.exp(0.5 * bv.P_plus) * np.cos(bv.phi_plus)
    s_mixed = np.exp(0.5 * bv.P_minus) * np.sin(0.5 * (bv.phi_plus - bv.phi_minus))
    return float(c_plus), float(s_mixed)


def monodromy_algebraic(
    phi_fn: CircleFunction,
    psi_fn: CircleFunction,
    bv: BoundaryValues,
) -> CircleFunction:
    """Monodromy from boundary data and half powers, no period shift.

    Implements

        Phi_M = (cp * Psi(z)^1/2 Phi(z)^1/2  + i sm * Psi(1/z)^1/2 Phi(1/z)^-1/2)
              / (cp * Psi(z)^1/2 Phi(z)^-1/2 - i sm * Psi(1/z)^1/2 Phi(1/z)^1/2)

    with cp = e^{P(T/2)/2} cos(phi(T/2)) and
    sm = e^{P(-T/2)/2} sin((phi(T/2) - phi(-T/2))/2), all half powers on the
    continuous branches through t = 0.
    """
    path = phi_fn.path
    if abs(abs(complex(np.exp(1j * path.phi0))) - 1.0) > 1e-12:
        raise ValueError("normalization |Phi(1)| = 1 violated")  # pragma: no cover
    cp, sm = _algebraic_coefficients(bv)

    def fn(t):
        S, R, Rrec, Srec = half_power_factors(path, t)
        num = cp * S + 1j * sm * R
        den = cp * Rrec - 1j * sm * Srec
        bad = np.abs(den) < DENOMINATOR_FLOOR
        if bad.any():
            raise DenominatorVanished(
                "monodromy denominator vanished", t=float(np.atleast_1d(t)[bad][0])
            )
        return num / den

    return CircleFunction("PhiM", path, fn)


@dataclass
class MonodromyReport:
    sup_residual_circle: float
    boundary_residual: float
    unimodularity_residual: float
    riccati_residual: float
    ray_residuals: list[tuple[float, float]]
    grid_size: int
    tol: float

    def to_json_obj(self) -> dict:
        return {
            "sup_residual_circle": self.sup_residual_circle,
            "boundary_residual": self.boundary_residual,
            "unimodularity_residual": self.unimodularity_residual,
            "riccati_residual": self.riccati_residual,
            "ray_residuals": [[r, v] for r, v in self.ray_residuals],
            "grid_size": self.grid_size,
            "tol": self.tol,
        }


def _algebraic_derivative(path: PhasePath, bv: BoundaryValues, t: np.ndarray) -> np.ndarray:
    """Analytic d/dt of the algebraic monodromy values (chain rule, no FD)."""
    from .circle import half_power_factor_dots

    cp, sm = _algebraic_coefficients(bv)
    S, R, Rrec, Srec = half_power_factors(path, t)
    Sd, Rd, Rrecd, Srecd = half_power_factor_dots(path, t)
    num = cp * S + 1j * sm * R
    den = cp * Rrec - 1j * sm * Srec
    num_d = cp * Sd + 1j * sm * Rd
    den_d = cp * Rrecd - 1j * sm * Srecd
    return (num_d * den - num * den_d) / den**2


def verify_monodromy(
    path: PhasePath,
    grid_size: int = 1001,
    rhos: list[float] | None = None,
    tol: float = 1e-12,
) -> MonodromyReport:
    """Certify the algebraic monodromy against the period shift.

    Grid comparison on [-T/2, T/2], the boundary identity at the cut, the
    unimodularity and Riccati residuals of the algebraic values, and - for
    each requested radius - a two-route continuation meeting the cut from
    opposite sides (the ray form of the monodromy identity).
    """
    if grid_size < 101:
        raise ValueError("grid_size must be >= 101")
    params = path.params
    T = params.T
    bv = boundary_values(path)
    from .circle import phi_on_circle, psi_on_circle

    alg = monodromy_algebraic(phi_on_circle(path), psi_on_circle(path), bv)
    direct = monodromy_direct(path)

    t = np.linspace(-T / 2, T / 2, grid_size)
    a = alg(t)
    d = direct(t)
    sup_circle = float(np.max(np.abs(a - d)))
    boundary = float(abs(alg(np.array([-T / 2]))[0] - np.exp(1j * bv.phi_plus)))
    unimod = float(np.max(np.abs(np.abs(a) - 1.0)))
    ric = float(
        np.max(np.abs(riccati_circle_residual(params, t, a, _algebraic_derivative(path, bv, t))))
    )

    ray_residuals: list[tuple[float, float]] = []
    for rho in rhos or []:
        # route A: Phi from z=1 radially out to rho, then the upper arc to the cut
        va, _, _ = continue_riccati_path(
            params,
            complex(np.exp(1j * path.phi0)),
            [("radial", 0.0, 1.0, rho), ("arc", rho, 0.0, np.pi)],
            tol=tol,
        )
        # route B: algebraic Phi_M from z=1 radially, then the lower arc
        vb, _, _ = continue_riccati_path(
            params,
            complex(alg(np.array([0.0]))[0]),
            [("radial", 0.0, 1.0, rho), ("arc", rho, 0.0, -np.pi)],
            tol=tol,
        )
        ray_residuals.append((float(rho), float(abs(va - vb))))

    return MonodromyReport(
        sup_residual_circle=sup_circle,
        boundary_residual=boundary,
        unimodularity_residual=unimod,
        riccati_residual=ric,
        ray_residuals=ray_residuals,
        grid_size=grid_size,
        tol=tol,
    )
