"""Basis functions of the associated linear second-order equation.

Two distinguished solutions E+ and E- are assembled from the circle pair
(Phi, Psi).  On the lifted circle they satisfy the coupled first-order pair

    E'(z) = +-(2 omega)^-1 z^(-ell-1) E(1/z) + mu E(z)

and hence the double confluent Heun equation

    z^2 E'' + ((ell+1) z + mu (1 - z^2)) E' + (lam - mu (ell+1) z) E = 0.

All derivatives used below are closed-form (chain rule through the phase
equation); no finite differences anywhere.

For positive integer order the operator L_B maps solutions to solutions and
its square reproduces the counterclockwise monodromy times the scalar first
integral; the lift of the argument reflection -z is t -> t + T/2 (the sign is
pinned by that composition law and recorded in every report).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .circle import (
    BoundaryValues,
    CircleFunction,
    half_power_factor_dots,
    half_power_factors,
)
from .errors import (
    DegenerateAtOne,
    DenominatorVanished,
    ToleranceNotMet,
    WindowTooSmall,
)
from .heunpoly import NumericQuad
from .params import ModelParams
from .phase import PhasePath

#: cos(phi(0)) threshold below which E+ and E- degenerate at z = 1.
COS_PHI0_FLOOR = 1e-8

#: Lift convention for the argument reflection in the symmetry operator:
#: -z on the cover is taken as t -> t + T/2.  With this choice the double
#: application reproduces the counterclockwise monodromy E(t + T).
MINUS_Z_LIFT = "t+T/2"
_LIFT_SIGN = +1.0


def _quarter(s: int) -> complex:
    """(1 +- i)/sqrt(2) as a unit phase."""
    return complex(np.cos(np.pi / 4), s * np.sin(np.pi / 4))


@dataclass
class HeunBasisPath:
    """Closed-form E+- evaluation anywhere on the lifted circle window."""

    params: ModelParams
    path: PhasePath
    ell: int

    def _prefactor(self, t: np.ndarray) -> np.ndarray:
        p = self.params
        return 0.5 * np.exp(p.mu * (np.cos(p.omega * t) - 1.0)) * np.exp(
            -0.5j * self.ell * p.omega * t
        )

    def E(self, t, s: int) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        S, R, _, _ = half_power_factors(self.path, t)
        return self._prefactor(t) * (_quarter(s) * S + _quarter(-s) * R)

    def Edot(self, t, s: int) -> np.ndarray:
        """Analytic d/dt of E on the circle."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        p = self.params
        S, R, _, _ = half_power_factors(self.path, t)
        Sd, Rd, _, _ = half_power_factor_dots(self.path, t)
        g = self._prefactor(t)
        gd_over_g = -p.mu * p.omega * np.sin(p.omega * t) - 0.5j * self.ell * p.omega
        return g * (gd_over_g * (_quarter(s) * S + _quarter(-s) * R)
                    + _quarter(s) * Sd + _quarter(-s) * Rd)

    def Eprime_chain(self, t, s: int) -> np.ndarray:
        """E'(z) from the t-derivative via d/dz = (i omega z)^-1 d/dt."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        z = np.exp(1j * self.params.omega * t)
        return self.Edot(t, s) / (1j * self.params.omega * z)

    def Eprime(self, t, s: int) -> np.ndarray:
        """E'(z) from the first-order pair (the reciprocal-point form)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        p = self.params
        zpow = np.exp(-1j * (self.ell + 1) * p.omega * t)
        return s / (2.0 * p.omega) * zpow * self.E(-t, s) + p.mu * self.E(t, s)

    def Esecond(self, t, s: int) -> np.ndarray:
        """E''(z) from differentiating the first-order pair once more."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        p = self.params
        ell = self.ell
        z = np.exp(1j * p.omega * t)
        return (s / (2.0 * p.omega)) * (
            -(ell + 1) * z ** (-ell - 2) * self.E(-t, s)
            - z ** (-ell - 3) * self.Eprime(-t, s)
        ) + p.mu * self.Eprime(t, s)


def build_E(phi_fn: CircleFunction, psi_fn: CircleFunction) -> HeunBasisPath:
    """Assemble the basis from the circle pair; gates the degenerate point."""
    path = phi_fn.path
    if psi_fn.path is not path:
        raise ValueError("phi and psi must come from the same PhasePath")
    if abs(np.cos(path.phi0)) < COS_PHI0_FLOOR:
        raise DegenerateAtOne(
            f"cos(phi(0)) = {np.cos(path.phi0):.2e}: basis degenerates at z = 1"
        )
    ell = path.params.require_integer_order()
    return HeunBasisPath(params=path.params, path=path, ell=ell)


def boundary_E_values(hb: HeunBasisPath, s: int) -> tuple[float, float]:
    """(formula value, closed boundary form) of E at z = 1.

    The closed form is -+ sin((phi(0) -+ pi/2)/2); comparing the two is the
    standard anti-sign-error check.
    """
    direct = complex(hb.E(np.array([0.0]), s)[0])
    closed = -s * np.sin(0.5 * (hb.path.phi0 - s * np.pi / 2.0))
    return float(direct.real), float(closed)


def wronskian_at_one(hb: HeunBasisPath) -> float:
    """E+(1) E-'(1) - E-(1) E+'(1) = -cos(phi(0))/(2 omega), real."""
    t0 = np.array([0.0])
    val = hb.E(t0, +1)[0] * hb.Eprime(t0, -1)[0] - hb.E(t0, -1)[0] * hb.Eprime(t0, +1)[0]
    return float(val.real)


def pair_ode_residual(hb: HeunBasisPath, t=None) -> float:
    """sup over the grid of the first-order-pair residual for both signs."""
    if t is None:
        T = hb.params.T
        t = np.linspace(max(hb.path.t_min, -1.4 * T), min(hb.path.t_max, 1.4 * T), 2001)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    p = hb.params
    worst = 0.0
    for s in (+1, -1):
        zpow = np.exp(-1j * (hb.ell + 1) * p.omega * t)
        res = hb.Eprime_chain(t, s) - s / (2.0 * p.omega) * zpow * hb.E(-t, s) - p.mu * hb.E(t, s)
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


def dche_residual(hb: HeunBasisPath, t=None, coeffs: tuple[complex, complex] | None = None) -> float:
    """sup residual of the second-order equation (analytic derivatives).

    With ``coeffs`` the residual is evaluated for the linear combination
    c+ E+ + c- E- instead of the two basis elements separately.
    """
    if t is None:
        T = hb.params.T
        t = np.linspace(max(hb.path.t_min, -1.4 * T), min(hb.path.t_max, 1.4 * T), 2001)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    p = hb.params
    z = np.exp(1j * p.omega * t)
    lam, mu, ell = p.lam, p.mu, hb.ell

    def residual_for(E, Ep, Epp):
        return z**2 * Epp + ((ell + 1) * z + mu * (1 - z**2)) * Ep + (lam - mu * (ell + 1) * z) * E

    if coeffs is not None:
        cp, cm = coeffs
        E = cp * hb.E(t, +1) + cm * hb.E(t, -1)
        Ep = cp * hb.Eprime(t, +1) + cm * hb.Eprime(t, -1)
        Epp = cp * hb.Esecond(t, +1) + cm * hb.Esecond(t, -1)
        return float(np.max(np.abs(residual_for(E, Ep, Epp))))
    worst = 0.0
    for s in (+1, -1):
        res = residual_for(hb.E(t, s), hb.Eprime(t, s), hb.Esecond(t, s))
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


def phi_alpha(hb: HeunBasisPath, alpha: float) -> CircleFunction:
    """The one-parameter family of unimodular solutions built on E+-.

    alpha = pi/2 reproduces the original Phi identically.
    """
    for s in (+1, -1):
        if abs(hb.E(np.array([0.0]), s)[0].imag) > 1e-10:
            raise DegenerateAtOne("Im E(1) != 0; basis not real-normalized")
    c, sn = np.cos(alpha / 2.0), np.sin(alpha / 2.0)
    omega, ell = hb.params.omega, hb.ell

    def fn(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        zl = np.exp(1j * ell * omega * t)
        num = c * hb.E(t, +1) + 1j * sn * hb.E(t, -1)
        den = c * hb.E(-t, +1) - 1j * sn * hb.E(-t, -1)
        bad = np.abs(den) < 1e-10
        if bad.any():
            raise DenominatorVanished("phi_alpha denominator vanished", t=float(t[bad][0]))
        return -1j * zl * num / den

    return CircleFunction(f"PhiAlpha[{alpha}]", hb.path, fn)


# ---------------------------------------------------------------------------
# Radial continuation of the linear equation
# ---------------------------------------------------------------------------


def continue_dche_ray(
    params: ModelParams,
    ell: int,
    theta: float,
    rho: float,
    E0: complex,
    Ep0: complex,
    tol: float = 1e-12,
) -> tuple[complex, complex]:
    """Continue one solution (value, derivative) of the linear equation
    radially from the circle point e^{i theta} to rho e^{i theta}."""
    if rho == 1.0:
        return E0, Ep0
    eith = complex(np.cos(theta), np.sin(theta))
    lam, mu = params.lam, params.mu

    def rhs(s, y):
        z = s * eith
        E = y[0] + 1j * y[1]
        Ep = y[2] + 1j * y[3]
        Epp = -(((ell + 1) * z + mu * (1 - z * z)) * Ep + (lam - mu * (ell + 1) * z) * E) / (z * z)
        dE = Ep * eith
        dEp = Epp * eith
        return (dE.real, dE.imag, dEp.real, dEp.imag)

    sol = solve_ivp(
        rhs,
        (1.0, float(rho)),
        (E0.real, E0.imag, Ep0.real, Ep0.imag),
        method="DOP853",
        rtol=max(tol, 1e-13),
        atol=max(tol, 1e-13) * 1e-2,
    )
    if not sol.success:
        raise ToleranceNotMet(f"radial continuation failed at rho={rho}")
    return complex(sol.y[0, -1], sol.y[1, -1]), complex(sol.y[2, -1], sol.y[3, -1])


def radial_continue_E(
    hb: HeunBasisPath,
    theta: float,
    rho_grid,
    tol: float = 1e-12,
) -> dict[int, np.ndarray]:
    """Continue E+- radially from the circle along theta.

    Returns {+1: values, -1: values} on the rho grid (values of E only).
    The second-order equation is integrated as a first-order system with the
    exact circle data as initial conditions.
    """
    p = hb.params
    rho_grid = np.atleast_1d(np.asarray(rho_grid, dtype=float))
    if np.any(rho_grid < 0.2) or np.any(rho_grid > 5.0):
        raise ValueError("rho grid outside the guarded annulus [0.2, 5]")
    t0 = theta / p.omega
    out: dict[int, np.ndarray] = {}
    for s in (+1, -1):
        E0 = complex(hb.E(np.array([t0]), s)[0])
        Ep0 = complex(hb.Eprime(np.array([t0]), s)[0])
        vals = np.empty(rho_grid.shape, dtype=complex)
        for i, rho in enumerate(rho_grid):
            vals[i], _ = continue_dche_ray(p, hb.ell, theta, float(rho), E0, Ep0, tol)
        out[s] = vals
    return out


def phi_from_basis(hb: HeunBasisPath, theta: float, rho: float, tol: float = 1e-12) -> complex:
    """Phi(rho e^{i theta}) reconstructed through the linear basis.

    Uses the identity-map member of the alpha family, which requires the
    basis at both the target point and its reciprocal.
    """
    Ez = radial_continue_E(hb, theta, [rho], tol)
    Erec = radial_continue_E(hb, -theta, [1.0 / rho], tol)
    c = np.cos(np.pi / 4.0)
    z = rho * complex(np.cos(theta), np.sin(theta))
    num = c * Ez[+1][0] + 1j * c * Ez[-1][0]
    den = c * Erec[+1][0] - 1j * c * Erec[-1][0]
    if abs(den) < 1e-12:
        raise DenominatorVanished("basis reconstruction denominator vanished")
    return -1j * z**hb.ell * num / den


# ---------------------------------------------------------------------------
# The symmetry operator
# ---------------------------------------------------------------------------


def _lift_shift(params: ModelParams, lift_sign: float = _LIFT_SIGN) -> float:
    return lift_sign * params.T / 2.0


def apply_B(
    hb: HeunBasisPath,
    nq: NumericQuad,
    t,
    coeffs: tuple[complex, complex] = (1.0, 0.0),
    lift_sign: float = _LIFT_SIGN,
) -> np.ndarray:
    """L_B applied to c+ E+ + c- E- on the lifted circle grid t."""
    if not nq.generic:
        from .errors import GenericityViolated

        raise GenericityViolated("operator is singular at this parameter point")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    p = hb.params
    shift = _lift_shift(p, lift_sign)
    ts = t + shift
    if np.any(ts < hb.path.t_min) or np.any(ts > hb.path.t_max) or np.any(
        -ts < hb.path.t_min
    ) or np.any(-ts > hb.path.t_max):
        raise WindowTooSmall("window does not cover the shifted arguments of L_B")
    cp, cm = coeffs
    E = cp * hb.E(ts, +1) + cm * hb.E(ts, -1)
    Ep = cp * hb.Eprime(ts, +1) + cm * hb.Eprime(ts, -1)
    return _lb_from_values(hb, nq, t, E, Ep)


def _lb_from_values(hb: HeunBasisPath, nq: NumericQuad, t, Ev, Epv) -> np.ndarray:
    p = hb.params
    ell = hb.ell
    z = np.exp(1j * p.omega * t)
    pref = (-1.0) ** ell * 2.0 * p.omega * np.exp(1j * (1 - ell) * p.omega * t) * np.exp(
        2.0 * p.mu * np.cos(p.omega * t)
    )
    return pref * (z**2 * nq("r", -z) * Epv + nq("s", -z) * Ev)


def apply_B_dot(
    hb: HeunBasisPath,
    nq: NumericQuad,
    t,
    coeffs: tuple[complex, complex] = (1.0, 0.0),
    lift_sign: float = _LIFT_SIGN,
) -> np.ndarray:
    """Analytic d/dt of apply_B (needed for the composition law)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    p = hb.params
    ell = hb.ell
    shift = _lift_shift(p, lift_sign)
    ts = t + shift
    cp, cm = coeffs
    E = cp * hb.E(ts, +1) + cm * hb.E(ts, -1)
    Ep = cp * hb.Eprime(ts, +1) + cm * hb.Eprime(ts, -1)
    Epp = cp * hb.Esecond(ts, +1) + cm * hb.Esecond(ts, -1)

    z = np.exp(1j * p.omega * t)
    zdot = 1j * p.omega * z
    zs = np.exp(1j * p.omega * ts)
    zsdot = 1j * p.omega * zs
    pref = (-1.0) ** ell * 2.0 * p.omega * np.exp(1j * (1 - ell) * p.omega * t) * np.exp(
        2.0 * p.mu * np.cos(p.omega * t)
    )
    pref_dot = pref * (1j * (1 - ell) * p.omega - 2.0 * p.mu * p.omega * np.sin(p.omega * t))
    G = z**2 * nq("r", -z) * Ep + nq("s", -z) * E
    G_dot = (
        (2.0 * z * nq("r", -z) - z**2 * nq("r'", -z)) * zdot * Ep
        + z**2 * nq("r", -z) * Epp * zsdot
        - nq("s'", -z) * zdot * E
        + nq("s", -z) * Ep * zsdot
    )
    return pref_dot * G + pref * G_dot


def check_B_squared(
    hb: HeunBasisPath,
    nq: NumericQuad,
    grid_size: int = 401,
    lift_sign: float = _LIFT_SIGN,
    rng: np.random.Generator | None = None,
) -> dict:
    """Certify the composition law L_B(L_B(E)) = D * E(t + T).

    Evaluated for both basis elements and one random combination on a grid
    over [-T/2, T/2]; reports sup relative residuals plus the lift convention.
    """
    p = hb.params
    T = p.T
    margin = 0.01 * T
    if hb.path.t_min > -1.5 * T - margin or hb.path.t_max < 1.5 * T + margin:
        raise WindowTooSmall(
            "composition check needs the window to cover [-3T/2, 3T/2] plus margin"
        )
    t = np.linspace(-T / 2, T / 2, grid_size)
    shift = _lift_shift(p, lift_sign)
    rng = rng or np.random.default_rng(20270101)
    combos = [(1.0 + 0.0j, 0.0j), (0.0j, 1.0 + 0.0j)]
    c_rand = (complex(rng.normal(), rng.normal()), complex(rng.normal(), rng.normal()))
    combos.append(c_rand)

    omega = p.omega
    results = []
    for cp, cm in combos:
        def Fval(u):
            return apply_B(hb, nq, u, coeffs=(cp, cm), lift_sign=lift_sign)

        def Fprime(u):
            zu = np.exp(1j * omega * np.atleast_1d(u))
            return apply_B_dot(hb, nq, u, coeffs=(cp, cm), lift_sign=lift_sign) / (1j * omega * zu)

        FF = _lb_from_values(hb, nq, t, Fval(t + shift), Fprime(t + shift))
        target = nq.D * (cp * hb.E(t + T, +1) + cm * hb.E(t + T, -1))
        scale = float(np.max(np.abs(target)))
        results.append(float(np.max(np.abs(FF - target))) / max(scale, 1e-300))
    return {
        "residual_e_plus": results[0],
        "residual_e_minus": results[1],
        "residual_random_combo": results[2],
        "lift_convention": MINUS_Z_LIFT if lift_sign > 0 else "t-T/2",
        "grid_size": grid_size,
        "D": nq.D,
    }


# ---------------------------------------------------------------------------
# Matrix form
# ---------------------------------------------------------------------------


@dataclass
class BMatrix:
    """Matrix of L_B in the (E+, E-) basis (columns are the images).

    The scalar prefactor and the diagonal factors of the displayed matrix
    form are kept alongside for audit; the matrix itself is assembled from
    boundary values at z = 1 and validated against the action of L_B.
    """

    matrix: np.ndarray
    prefactor: complex
    diag: tuple[complex, complex]
    d_plus: float
    d_minus: float
    wronskian_at_1: float
    lift_convention: str

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.matrix))

    def det_relation_residual(self, D: float) -> float:
        """|det(B)^2 - D^2| / D^2 (the composition-law determinant identity)."""
        return float(abs(self.det**2 - D**2) / D**2)


class _BoundaryEAlgebra:
    """E+- and derivatives at the three special lifts, from boundary data only."""

    def __init__(self, bv: BoundaryValues, params: ModelParams, ell: int):
        self.bv = bv
        self.p = params
        self.ell = ell
        mu = params.mu
        self._gp = 0.5 * np.exp(-2.0 * mu) * (-1j) ** ell   # prefactor at t = +T/2
        self._gm = 0.5 * np.exp(-2.0 * mu) * (1j) ** ell    # prefactor at t = -T/2
        self._pp = bv.Psi_plus_sqrt
        self._pm = bv.Psi_minus_sqrt
        self._ep = complex(np.exp(0.5j * bv.phi_plus))
        self._em = complex(np.exp(0.5j * bv.phi_minus))

    def E(self, where: str, s: int) -> complex:
        if where == "0":
            return complex(np.cos(0.5 * self.bv.phi_at_0 + s * np.pi / 4.0))
        if where == "+":
            a = self._pp * self._ep
            b = self._pm / self._em
            return self._gp * (_quarter(s) * a + _quarter(-s) * b)
        a = self._pm * self._em
        b = self._pp / self._ep
        return self._gm * (_quarter(s) * a + _quarter(-s) * b)

    def Eprime(self, where: str, s: int) -> complex:
        p = self.p
        if where == "0":
            return (s / (2.0 * p.omega) + p.mu) * self.E("0", s)
        sign = (-1.0) ** (self.ell + 1)  # e^{-+ i (ell+1) pi}
        if where == "+":
            return s / (2.0 * p.omega) * sign * self.E("-", s) + p.mu * self.E("+", s)
        return s / (2.0 * p.omega) * sign * self.E("+", s) + p.mu * self.E("-", s)

    def Esecond(self, where: str, s: int) -> complex:
        p, ell = self.p, self.ell
        if where == "+":
            zk = lambda k: (-1.0) ** k  # z = e^{i pi}
            rec = "-"
        elif where == "-":
            zk = lambda k: (-1.0) ** k  # z = e^{-i pi}: integer powers agree
            rec = "+"
        else:
            zk = lambda k: 1.0
            rec = "0"
        return (s / (2.0 * p.omega)) * (
            -(ell + 1) * zk(-ell - 2) * self.E(rec, s)
            - zk(-ell - 3) * self.Eprime(rec, s)
        ) + p.mu * self.Eprime(where, s)


def build_matrix_B(bv: BoundaryValues, nq: NumericQuad, params: ModelParams) -> BMatrix:
    """Assemble the matrix of L_B from boundary values at z = 1.

    The two columns are obtained by expressing L_B[E+-] through the basis
    values and first derivatives at z = 1; every ingredient is closed-form
    boundary data (no grids, no fits).
    """
    if not nq.generic:
        from .errors import GenericityViolated

        raise GenericityViolated("operator is singular at this parameter point")
    c0 = np.cos(bv.phi_at_0)
    if abs(c0) < COS_PHI0_FLOOR:
        raise DegenerateAtOne(f"cos(phi(0)) = {c0:.2e}: basis degenerates at z = 1")
    ell = params.require_integer_order()
    alg = _BoundaryEAlgebra(bv, params, ell)
    omega, mu = params.omega, params.mu

    # values of L_B[E_s] and its z-derivative at z = 1 (lift of -z: t = +T/2)
    sgn = (-1.0) ** ell
    r_m1 = complex(nq("r", np.array([-1.0 + 0j]))[0])
    s_m1 = complex(nq("s", np.array([-1.0 + 0j]))[0])
    rp_m1 = complex(nq("r'", np.array([-1.0 + 0j]))[0])
    sp_m1 = complex(nq("s'", np.array([-1.0 + 0j]))[0])
    pref = sgn * 2.0 * omega * np.exp(2.0 * mu)
    pref_dot = pref * 1j * (1 - ell) * omega  # mu(1 - z^-2) vanishes at z = 1

    cols = []
    for s in (+1, -1):
        E_s = alg.E("+", s)
        Ep_s = alg.Eprime("+", s)
        Epp_s = alg.Esecond("+", s)
        G = r_m1 * Ep_s + s_m1 * E_s
        # d/dt at t=0 of z^2 r(-z) E'(ts) + s(-z) E(ts); z(0)=1, z_s(0)=-1
        zdot = 1j * omega
        zsdot = -1j * omega
        G_dot = (
            (2.0 * r_m1 - rp_m1) * zdot * Ep_s
            + r_m1 * Epp_s * zsdot
            - sp_m1 * zdot * E_s
            + s_m1 * Ep_s * zsdot
        )
        lb_val = pref * G
        lb_prime = (pref_dot * G + pref * G_dot) / (1j * omega)
        V = np.array(
            [
                [alg.E("0", +1), alg.E("0", -1)],
                [alg.Eprime("0", +1), alg.Eprime("0", -1)],
            ],
            dtype=complex,
        )
        cols.append(np.linalg.solve(V, np.array([lb_val, lb_prime], dtype=complex)))

    matrix = np.stack(cols, axis=1)
    prefactor = (1j**ell) / (2.0 * omega)  # e^{-P(0)/2} = 1 kept implicit
    diag = (
        complex(-np.exp(-1j * np.pi / 4) * nq.d_plus / np.cos(0.5 * bv.phi_at_0 - np.pi / 4)),
        complex(np.exp(1j * np.pi / 4) * nq.d_minus / np.cos(0.5 * bv.phi_at_0 + np.pi / 4)),
    )
    return BMatrix(
        matrix=matrix,
        prefactor=prefactor,
        diag=diag,
        d_plus=nq.d_plus,
        d_minus=nq.d_minus,
        wronskian_at_1=-float(c0) / (2.0 * omega),
        lift_convention=MINUS_Z_LIFT,
    )


def operation_report(
    check: str, params: ModelParams, grid: int, sup_residual: float
) -> dict:
    """Per-operation verification record in the fixed report shape."""
    return {
        "check": check,
        "params": {"ell": params.ell, "mu": params.mu, "omega": params.omega},
        "grid": grid,
        "sup_residual": sup_residual,
        "convention_used": MINUS_Z_LIFT,
    }


def matrix_action_residual(
    hb: HeunBasisPath, nq: NumericQuad, bmat: BMatrix, grid_size: int = 201
) -> float:
    """sup relative deviation between L_B and its matrix on a circle grid."""
    T = hb.params.T
    t = np.linspace(-0.3 * T, 0.3 * T, grid_size)
    worst = 0.0
    for s, col in ((+1, 0), (-1, 1)):
        direct = apply_B(hb, nq, t, coeffs=(1.0, 0.0) if s > 0 else (0.0, 1.0))
        via_matrix = bmat.matrix[0, col] * hb.E(t, +1) + bmat.matrix[1, col] * hb.E(t, -1)
        scale = float(np.max(np.abs(direct)))
        worst = max(worst, float(np.max(np.abs(direct - via_matrix))) / max(scale, 1e-300))
    return worst
