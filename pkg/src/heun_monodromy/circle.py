"""Functions on (a neighborhood of) the punctured unit circle.

The circle is parametrized by real time through z = exp(i*omega*t); every
on-circle evaluation reduces to a PhasePath lookup, which keeps all
half-power branches anchored by the continuous unwrapped phase.  The
reciprocal point 1/z on the circle is the lift t -> -t.

Off-circle values are produced by integrating the Riccati equation along
radial rays and arcs, with a 1/Phi chart switch around poles.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .errors import NonAnalyticOnRay, ToleranceNotMet, WindowTooSmall
from .params import ModelParams
from .phase import PhasePath

#: |Phi| at which continuation switches to the W = 1/Phi chart.
CHART_SWITCH_UP = 1e3
#: |Phi| at which the W chart hands back to the Phi chart (hysteresis band).
CHART_SWITCH_DOWN = 1e2
#: Both-charts blow-up bound: beyond this the point is reported non-analytic.
CHART_LIMIT = 1e6

#: Annulus guard for off-circle continuation.
RHO_MIN, RHO_MAX = 0.2, 5.0


@dataclass(frozen=True)
class CoverPoint:
    """Point of the universal cover: radius > 0 and an unreduced angle."""

    rho: float
    theta: float

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive")

    @property
    def z(self) -> complex:
        return self.rho * complex(np.cos(self.theta), np.sin(self.theta))


@dataclass
class CircleFunction:
    """A named function of t along the lifted circle."""

    kind: str
    path: PhasePath
    fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, t) -> np.ndarray:
        return self.fn(np.atleast_1d(np.asarray(t, dtype=float)))


def phi_on_circle(path: PhasePath) -> CircleFunction:
    """Phi(e^{i omega t}) = e^{i phi(t)}."""
    return CircleFunction("Phi", path, lambda t: np.exp(1j * path.phi(t)))


def phi_sqrt_on_circle(path: PhasePath) -> CircleFunction:
    """Continuous branch e^{i phi(t)/2} anchored by the unwrapped phase."""
    return CircleFunction("PhiSqrt", path, lambda t: np.exp(0.5j * path.phi(t)))


def psi_on_circle(path: PhasePath) -> CircleFunction:
    """Psi(e^{i omega t}) = e^{P(t)}, normalized to Psi(1) = 1 by P(0) = 0."""
    return CircleFunction("Psi", path, lambda t: np.exp(path.P(t)))


def psi_sqrt_on_circle(path: PhasePath) -> CircleFunction:
    return CircleFunction("PsiSqrt", path, lambda t: np.exp(0.5 * path.P(t)))


def half_power_factors(path: PhasePath, t: np.ndarray):
    """The four half-power products used by every transform formula.

    Returns (S, R, Rrec, Srec) with, in circle coordinates,

        S    = Psi(z)^1/2   Phi(z)^1/2    = exp((P(t) + i phi(t))/2)
        R    = Psi(1/z)^1/2 Phi(1/z)^-1/2 = exp((P(-t) - i phi(-t))/2)
        Rrec = Psi(z)^1/2   Phi(z)^-1/2   = exp((P(t) - i phi(t))/2)
        Srec = Psi(1/z)^1/2 Phi(1/z)^1/2  = exp((P(-t) + i phi(-t))/2)
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    ph, P = path.eval(t)
    phm, Pm = path.eval(-t)
    S = np.exp(0.5 * (P + 1j * ph))
    R = np.exp(0.5 * (Pm - 1j * phm))
    Rrec = np.exp(0.5 * (P - 1j * ph))
    Srec = np.exp(0.5 * (Pm + 1j * phm))
    return S, R, Rrec, Srec


def half_power_factor_dots(path: PhasePath, t: np.ndarray):
    """Analytic d/dt of the four half-power products (same order)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    ph, P = path.eval(t)
    phm, Pm = path.eval(-t)
    S = np.exp(0.5 * (P + 1j * ph))
    R = np.exp(0.5 * (Pm - 1j * phm))
    Rrec = np.exp(0.5 * (P - 1j * ph))
    Srec = np.exp(0.5 * (Pm + 1j * phm))
    dph = path.phidot(t, ph)
    dphm = path.phidot(-t, phm)
    Sd = 0.5 * (np.cos(ph) + 1j * dph) * S
    Rd = 0.5 * (-np.cos(phm) + 1j * dphm) * R
    Rrecd = 0.5 * (np.cos(ph) - 1j * dph) * Rrec
    Srecd = 0.5 * (-np.cos(phm) - 1j * dphm) * Srec
    return Sd, Rd, Rrecd, Srecd


@dataclass(frozen=True)
class BoundaryValues:
    """Values of phi, P and the transform building blocks at t = 0, +-T/2."""

    phi_plus: float
    phi_minus: float
    phi_at_0: float
    P_plus: float
    P_minus: float

    @property
    def Phi_plus(self) -> complex:
        return complex(np.exp(1j * self.phi_plus))

    @property
    def Phi_minus(self) -> complex:
        return complex(np.exp(1j * self.phi_minus))

    @property
    def Phi_at_1(self) -> complex:
        return complex(np.exp(1j * self.phi_at_0))

    @property
    def Psi_plus(self) -> float:
        return float(np.exp(self.P_plus))

    @property
    def Psi_minus(self) -> float:
        return float(np.exp(self.P_minus))

    # half powers on the continuous branch
    @property
    def Phi_plus_sqrt(self) -> complex:
        return complex(np.exp(0.5j * self.phi_plus))

    @property
    def Phi_minus_sqrt(self) -> complex:
        return complex(np.exp(0.5j * self.phi_minus))

    @property
    def Psi_plus_sqrt(self) -> float:
        return float(np.exp(0.5 * self.P_plus))

    @property
    def Psi_minus_sqrt(self) -> float:
        return float(np.exp(0.5 * self.P_minus))


def boundary_values(path: PhasePath) -> BoundaryValues:
    """Boundary data at the cut edges e^{+-i pi} and at z = 1."""
    T = path.params.T
    php, Pp = (float(v[0]) for v in path.eval(T / 2))
    phm, Pm = (float(v[0]) for v in path.eval(-T / 2))
    return BoundaryValues(
        phi_plus=php,
        phi_minus=phm,
        phi_at_0=path.phi0,
        P_plus=Pp,
        P_minus=Pm,
    )


# ---------------------------------------------------------------------------
# Theta pair
# ---------------------------------------------------------------------------

#: Orientation of the theta subsystem realized on the circle.  The paired
#: equations are integrated as
#:
#:     dTheta/dt      = +1/2 * Phi    * (Theta - ThetaTilde)
#:     dThetaTilde/dt = -1/2 * Phi^-1 * (Theta - ThetaTilde)
#:
#: which is the unique orientation under which (Theta - ThetaTilde)/(2i)
#: reproduces the quadrature e^{P(t)} (route equivalence pins the sign).
THETA_ORIENTATION = "d/dt realization: 2 i omega z d/dz |-> -2 d/dt on theta displays"


@dataclass
class ThetaPair:
    """Dense solutions Theta, ThetaTilde with Theta(1)=i, ThetaTilde(1)=-i."""

    path: PhasePath
    theta: CircleFunction
    theta_tilde: CircleFunction

    def psi_route(self, t) -> np.ndarray:
        """(Theta - ThetaTilde) / (2i): equals e^{P(t)} on the circle."""
        return (self.theta(t) - self.theta_tilde(t)) / 2j

    def route_equivalence_residual(self, t) -> float:
        return float(np.max(np.abs(self.psi_route(t) - np.exp(self.path.P(t)))))


def theta_pair_solve(path: PhasePath, tol: float = 1e-12) -> ThetaPair:
    """Integrate the theta subsystem along the circle from t = 0 both ways."""

    def rhs(t, y):
        th = y[0] + 1j * y[1]
        tht = y[2] + 1j * y[3]
        Phi = np.exp(1j * path.phi(t)[0])
        d = th - tht
        dth = 0.5 * Phi * d
        dtht = -0.5 * d / Phi
        return (dth.real, dth.imag, dtht.real, dtht.imag)

    y0 = (0.0, 1.0, 0.0, -1.0)
    kw = dict(method="DOP853", rtol=max(tol, 1e-13), atol=max(tol, 1e-13) * 1e-2,
              dense_output=True)
    fwd = solve_ivp(rhs, (0.0, path.t_max), y0, **kw)
    bwd = solve_ivp(rhs, (0.0, path.t_min), y0, **kw)
    if not (fwd.success and bwd.success):
        raise ToleranceNotMet("theta-pair integration failed")

    def make(i_re, i_im):
        def fn(t):
            t = np.atleast_1d(np.asarray(t, dtype=float))
            out = np.empty(t.shape, dtype=complex)
            m = t >= 0
            if m.any():
                Y = fwd.sol(t[m])
                out[m] = Y[i_re] + 1j * Y[i_im]
            if (~m).any():
                Y = bwd.sol(t[~m])
                out[~m] = Y[i_re] + 1j * Y[i_im]
            return out

        return fn

    return ThetaPair(
        path=path,
        theta=CircleFunction("Theta", path, make(0, 1)),
        theta_tilde=CircleFunction("ThetaTilde", path, make(2, 3)),
    )


# ---------------------------------------------------------------------------
# Riccati continuation off the circle
# ---------------------------------------------------------------------------


def riccati_rhs(params: ModelParams, z: complex, F: complex) -> complex:
    """Right-hand side of the Riccati equation in the Phi chart."""
    return (1.0 - F * F) / (2j * params.omega * z) + (
        params.ell / z + params.mu * (1.0 + z**-2)
    ) * F


def riccati_rhs_inverse(params: ModelParams, z: complex, W: complex) -> complex:
    """Mirrored equation satisfied by W = 1/Phi (linear term sign flipped)."""
    return (1.0 - W * W) / (2j * params.omega * z) - (
        params.ell / z + params.mu * (1.0 + z**-2)
    ) * W


def riccati_circle_residual(params: ModelParams, t, F, Fdot) -> np.ndarray:
    """Residual of the Riccati equation along the circle.

    Uses the chain rule d/dt = i*omega*z*d/dz, under which the equation reads
    dF/dt = (1 - F^2)/2 + i*omega*(ell + 2*mu*cos(omega*t))*F.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    drive = params.ell + 2.0 * params.mu * np.cos(params.omega * t)
    return Fdot - (0.5 * (1.0 - F * F) + 1j * params.omega * drive * F)


Segment = tuple  # ("radial", theta, rho0, rho1) | ("arc", rho, theta0, theta1)


def _segment_funcs(seg: Segment):
    if seg[0] == "radial":
        _, theta, s0, s1 = seg
        e = complex(np.cos(theta), np.sin(theta))
        return (lambda s: s * e), (lambda s: e), s0, s1
    if seg[0] == "arc":
        _, rho, th0, th1 = seg
        return (
            lambda s: rho * complex(np.cos(s), np.sin(s)),
            lambda s: 1j * rho * complex(np.cos(s), np.sin(s)),
            th0,
            th1,
        )
    raise ValueError(f"unknown segment kind {seg[0]!r}")


def continue_riccati_path(
    params: ModelParams,
    F0: complex,
    segments: list[Segment],
    tol: float = 1e-12,
) -> tuple[complex, bool, int]:
    """Continue a Riccati solution along a piecewise path.

    Returns (value, pole_flag, chart_switches).  The continuation runs in the
    Phi chart until |Phi| reaches 1e3, then in the W = 1/Phi chart until
    |Phi| falls back to 1e2 (hysteresis).  If a chart value passes 1e6 with
    the other chart unusable, the target is flagged non-analytic.
    """
    value = complex(F0)
    chart = "phi"  # or "inv"
    switches = 0
    rtol = max(tol, 1e-13)

    for seg in segments:
        zfun, dzfun, s0, s1 = _segment_funcs(seg)
        if s0 == s1:
            continue
        s = s0
        while True:
            if chart == "phi":
                def f(s_, y):
                    F = y[0] + 1j * y[1]
                    d = riccati_rhs(params, zfun(s_), F) * dzfun(s_)
                    return (d.real, d.imag)

                def ev_up(s_, y):
                    return y[0] ** 2 + y[1] ** 2 - CHART_SWITCH_UP**2

                ev_up.terminal = True
                events = (ev_up,)
            else:
                def f(s_, y):
                    W = y[0] + 1j * y[1]
                    d = riccati_rhs_inverse(params, zfun(s_), W) * dzfun(s_)
                    return (d.real, d.imag)

                def ev_back(s_, y):
                    return y[0] ** 2 + y[1] ** 2 - (1.0 / CHART_SWITCH_DOWN) ** 2

                ev_back.terminal = True
                ev_back.direction = 1.0
                events = (ev_back,)

            sol = solve_ivp(
                f,
                (s, s1),
                (value.real, value.imag),
                method="DOP853",
                rtol=rtol,
                atol=rtol * 1e-2,
                events=events,
                dense_output=False,
            )
            if not sol.success:
                raise NonAnalyticOnRay(
                    f"continuation failed on segment {seg} near s={sol.t[-1]:.6g}",
                    rho=abs(zfun(sol.t[-1])),
                )
            value = complex(sol.y[0, -1], sol.y[1, -1])
            if sol.status == 1:  # chart switch event
                s = float(sol.t[-1])
                if abs(value) == 0 or abs(value) > CHART_LIMIT:
                    raise NonAnalyticOnRay(
                        f"both charts unusable on segment {seg} at s={s:.6g}",
                        rho=abs(zfun(s)),
                    )
                value = 1.0 / value
                chart = "inv" if chart == "phi" else "phi"
                switches += 1
                if s == s1:  # event landed on the segment end
                    break
                continue
            break

    pole_flag = False
    if chart == "inv":
        if abs(value) < 1.0 / CHART_LIMIT:
            pole_flag = True  # endpoint sits (numerically) on a pole of Phi
            value = complex(np.inf, np.inf) if value == 0 else 1.0 / value
        else:
            value = 1.0 / value
    else:
        if abs(value) > CHART_LIMIT:
            pole_flag = True
    return value, pole_flag, switches


def riccati_continue_ray(
    path: PhasePath,
    theta: float,
    rho_target: float,
    tol: float = 1e-12,
) -> tuple[complex, bool]:
    """Value of Phi at rho_target * e^{i theta}, continued radially from the circle.

    The starting value is the circle value e^{i phi(theta/omega)} on the lift;
    theta must stay within the lifted window.
    """
    params = path.params
    if not (RHO_MIN <= rho_target <= RHO_MAX):
        raise ValueError(f"rho_target must lie in [{RHO_MIN}, {RHO_MAX}]")
    t0 = theta / params.omega
    if not (path.t_min <= t0 <= path.t_max):
        raise WindowTooSmall(f"theta={theta} lies outside the lifted window")
    F0 = complex(np.exp(1j * path.phi(t0)[0]))
    if rho_target == 1.0:
        return F0, False
    value, pole, _ = continue_riccati_path(
        params, F0, [("radial", theta, 1.0, rho_target)], tol=tol
    )
    return value, pole
