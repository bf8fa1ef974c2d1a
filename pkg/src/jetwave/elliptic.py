"""Harmonic potential on the mapped cylinder and the Dirichlet-to-Neumann map.

The fluid domain r < eta(theta, z) is pulled back to the unit cylinder by the
global map r = rho * eta.  The pulled-back Laplace equation reads

    L phi = alpha d_rho^2 phi + beta . grad_w d_rho phi + gamma d_rho phi
            + (1/(rho^2 eta^2)) d_theta^2 phi + d_z^2 phi = 0,

    alpha = (1 + (eta_theta/eta)^2 + rho^2 eta_z^2) / eta^2,
    beta  = (-2 eta_theta/(rho eta^3), -2 rho eta_z/eta),
    gamma = -(1/(rho eta)) d_theta(eta_theta/eta^2)
            - rho eta d_z(eta_z/eta^2) + 1/(rho eta^2),

with phi = psi on rho = 1.  Rather than collocating this strong form, the
solver discretizes the underlying Dirichlet energy

    E[phi] = 1/2 * integral of |grad phi|^2 over the fluid domain
           = 1/2 * iint ( e1^2 + e2^2 + e3^2 ) rho eta^2 drho dtheta dz,

    e1 = d_rho phi / eta,
    e2 = d_theta phi/(rho eta) - (eta_theta/eta^2) d_rho phi,
    e3 = d_z phi - (rho eta_z/eta) d_rho phi,

with Fourier modes in (theta, z) and polynomials on Legendre-Gauss-Radau
nodes in rho (the node rho = 1 carries the Dirichlet trace; no node sits on
the axis, and no artificial axis condition is needed).  The discrete bilinear
form is symmetric positive semi-definite by construction, so the resulting
discrete operator eta*G(eta) is exactly self-adjoint and the kinetic energy
is exactly nonnegative -- independently of resolution.

The linear system is solved by conjugate gradients preconditioned with the
same energy form frozen at the mean radius, which decouples into dense SPD
systems per Fourier mode.

The conormal flux eta*G(eta)psi is extracted variationally (boundary rows of
the discrete operator), which is the discretization of the duality pairing

    integral (eta G(eta) psi) h  =  iint grad phi . grad H  dV;

note the eta-weight on the left, required for consistency with the kinetic
energy  E_k = 1/2 * integral psi (eta G(eta) psi).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft as _sfft
from numpy.polynomial import legendre as npleg

from .errors import ConvergenceError, DomainViolationError
from .geometry import SurfaceState, grad_bar_eta, mean_curvature, potential_energy
from .spectral import (
    TorusField,
    TorusGrid,
    dealiased_product,
    integrate_product,
    nonlinear_eval,
    spectral_derivative,
)

TOL_DEFAULT = 1e-11
TOL_RANGE = (1e-13, 1e-6)
MAX_ITER_DEFAULT = 200


# ---------------------------------------------------------------------------
# radial discretization
# ---------------------------------------------------------------------------

def _gauss_radau_left(n):
    """Legendre-Gauss-Radau nodes/weights on [-1, 1] including x = -1.

    Nodes are the roots of P_{n-1} + P_n; the quadrature is exact for
    polynomials of degree <= 2n - 2.
    """
    c = np.zeros(n + 1)
    c[n - 1] = 1.0
    c[n] = 1.0
    x = npleg.legroots(c)
    x = np.sort(x.real)
    x[0] = -1.0
    w = np.empty(n)
    w[0] = 2.0 / n ** 2
    pnm1 = npleg.legval(x[1:], [0.0] * (n - 1) + [1.0])
    w[1:] = (1.0 - x[1:]) / (n ** 2 * pnm1 ** 2)
    return x, w


def _barycentric_weights(x):
    n = len(x)
    w = np.ones(n)
    for j in range(n):
        w[j] = 1.0 / np.prod(x[j] - np.delete(x, j))
    return w / np.abs(w).max()


def _differentiation_matrix(x, w):
    n = len(x)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                D[i, j] = (w[j] / w[i]) / (x[i] - x[j])
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


@dataclass(frozen=True)
class RadialGrid:
    """Gauss-Radau collocation on (0, 1], boundary node rho = 1 last."""

    n_rho: int

    def __post_init__(self):
        if self.n_rho < 4:
            raise ValueError("n_rho must be at least 4")

    @property
    def _built(self):
        return _build_radial(self.n_rho)

    @property
    def nodes(self):
        return self._built[0]

    @property
    def weights(self):
        return self._built[1]

    @property
    def D(self):
        return self._built[2]

    def interpolate(self, values, targets):
        """Barycentric interpolation of nodal data to arbitrary points."""
        x = self.nodes
        w = self._built[3]
        targets = np.atleast_1d(np.asarray(targets, dtype=float))
        num = np.zeros((len(targets),) + np.shape(values)[1:])
        den = np.zeros(len(targets))
        exact = {}
        for i, t in enumerate(targets):
            d = t - x
            hit = np.nonzero(d == 0.0)[0]
            if hit.size:
                exact[i] = hit[0]
                continue
            r = w / d
            num[i] = np.tensordot(r, values, axes=(0, 0))
            den[i] = r.sum()
        out = num / den.reshape((-1,) + (1,) * (num.ndim - 1))
        for i, j in exact.items():
            out[i] = values[j]
        return out


@lru_cache(maxsize=8)
def _build_radial(n_rho):
    x, wx = _gauss_radau_left(n_rho)
    rho = (1.0 - x) / 2.0          # x = -1 -> rho = 1; interior x -> rho in (0,1)
    order = np.argsort(rho)        # ascending; boundary rho = 1 ends up last
    rho = rho[order]
    w = (wx / 2.0)[order]
    bary = _barycentric_weights(rho)
    D = _differentiation_matrix(rho, bary)
    for a in (rho, w, D, bary):
        a.setflags(write=False)
    return rho, w, D, bary


# ---------------------------------------------------------------------------
# strong-form coefficients (used for diagnostics and by the symbol calculus)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MappedCoefficients:
    """alpha, beta, gamma of the mapped Laplacian sampled on rho x (theta,z).

    alpha is bounded below by 1/max(eta)^2; beta and gamma carry the inverse
    powers of rho of the polar coordinates.
    """

    rho: np.ndarray
    alpha: np.ndarray
    beta_theta: np.ndarray
    beta_z: np.ndarray
    gamma: np.ndarray


def build_coefficients(eta: TorusField, rho_nodes) -> MappedCoefficients:
    """Evaluate alpha, beta, gamma pointwise with spectral eta-derivatives."""
    if eta.min() <= 0.0:
        raise DomainViolationError("eta must be strictly positive")
    rho = np.atleast_1d(np.asarray(rho_nodes, dtype=float))
    if np.any(rho <= 0.0) or np.any(rho > 1.0):
        raise ValueError("rho nodes must lie in (0, 1]")
    e = eta.values
    et = spectral_derivative(eta, "theta").values
    ez = spectral_derivative(eta, "z").values
    r = rho[:, None, None]
    alpha = (1.0 + (et / e) ** 2 + r ** 2 * ez ** 2) / e ** 2
    beta_theta = -2.0 * et / (r * e ** 3)
    beta_z = -2.0 * r * ez / e
    q_t = nonlinear_eval(lambda u, x: u / x ** 2, spectral_derivative(eta, "theta"), eta)
    q_z = nonlinear_eval(lambda u, x: u / x ** 2, spectral_derivative(eta, "z"), eta)
    dq_t = spectral_derivative(q_t, "theta").values
    dq_z = spectral_derivative(q_z, "z").values
    gamma = -dq_t / (r * e) - r * e * dq_z + 1.0 / (r * e ** 2)
    return MappedCoefficients(rho, alpha, beta_theta, beta_z, gamma)


# ---------------------------------------------------------------------------
# solution container
# ---------------------------------------------------------------------------

class PotentialField:
    """Potential on the mapped cylinder: nodal in rho, grid in (theta, z)."""

    def __init__(self, radial: RadialGrid, grid: TorusGrid, values,
                 iterations, residual):
        values = np.asarray(values, dtype=float)
        values.setflags(write=False)
        self.radial = radial
        self.grid = grid
        self.values = values
        self.iterations = int(iterations)
        self.residual = float(residual)

    def trace(self) -> TorusField:
        """phi at rho = 1 (equals the Dirichlet data exactly)."""
        return TorusField(self.grid, self.values[-1])

    def rho_derivative_at_surface(self) -> TorusField:
        return TorusField(
            self.grid, np.tensordot(self.radial.D[-1], self.values, axes=(0, 0))
        )

    def modal_profile(self, m, n):
        """Radial profile of the (m, n)-th Fourier mode (integer indices)."""
        c = np.fft.fft2(self.values, axes=(1, 2)) / (self.grid.n_theta * self.grid.n_z)
        return c[:, m % self.grid.n_theta, n % self.grid.n_z]

    def strong_residual(self, eta: TorusField):
        """Pointwise residual of the rho^2-regularized strong-form operator.

        Diagnostic only: the solver drives the variational residual below its
        tolerance; this quantity collocates rho^2 * L phi at the interior
        nodes (the rho^2 factor bounds the polar coefficients, so near-axis
        values are not roundoff-amplified) and decays spectrally with
        resolution.
        """
        rho = self.radial.nodes
        co = build_coefficients(eta, rho)
        D = self.radial.D
        phi = self.values
        dphi = np.tensordot(D, phi, axes=(1, 0))
        d2phi = np.tensordot(D @ D, phi, axes=(1, 0))
        grid = self.grid
        mt, mz = _w_multipliers(grid)
        dth_dphi = _apply_w(dphi, mt)
        dz_dphi = _apply_w(dphi, mz)
        d2th = _apply_w(phi, mt * mt)
        d2z = _apply_w(phi, mz * mz)
        e = eta.values
        r = rho[:, None, None]
        res = r ** 2 * (co.alpha * d2phi + co.beta_theta * dth_dphi
                        + co.beta_z * dz_dphi + co.gamma * dphi + d2z) \
            + d2th / e ** 2
        return res[:-1]


# ---------------------------------------------------------------------------
# trace bundle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TraceBundle:
    """Boundary quantities derived from one elliptic solve.

    G is the variational Dirichlet-to-Neumann value (flux / eta), G_trace the
    algebraic combination B - V . grad_bar eta; their agreement is a solver
    consistency diagnostic.  flux = eta * G(eta) psi.
    """

    d_rho_phi: TorusField
    B: TorusField
    V_theta: TorusField
    V_z: TorusField
    N: TorusField
    G: TorusField
    G_trace: TorusField
    flux: TorusField
    kinetic_energy: float
    iterations: int
    residual: float

    def gradient_identity_residual(self, psi: TorusField, eta: TorusField):
        """max-norm of grad_bar psi - V - B grad_bar eta (both components)."""
        gbt, gbz = grad_bar_eta(eta)
        pt = nonlinear_eval(lambda a, e: a / e, spectral_derivative(psi, "theta"), eta)
        pz = spectral_derivative(psi, "z")
        r1 = pt - self.V_theta - dealiased_product(self.B, gbt)
        r2 = pz - self.V_z - dealiased_product(self.B, gbz)
        return max(r1.max_norm(), r2.max_norm())

    def b_formula_residual(self, psi: TorusField, eta: TorusField):
        """max-norm of B - (G + grad_bar psi . grad_bar eta)/(1 + |grad_bar eta|^2)."""
        gbt, gbz = grad_bar_eta(eta)
        pt = nonlinear_eval(lambda a, e: a / e, spectral_derivative(psi, "theta"), eta)
        pz = spectral_derivative(psi, "z")
        num = self.G + dealiased_product(pt, gbt) + dealiased_product(pz, gbz)
        recon = nonlinear_eval(
            lambda n, a, b: n / (1.0 + a ** 2 + b ** 2), num, gbt, gbz
        )
        return (self.B - recon).max_norm()


# ---------------------------------------------------------------------------
# solver
# ---------------------------------------------------------------------------

def _w_multipliers(grid: TorusGrid):
    """First-derivative multipliers in theta and z with Nyquist zeroed."""
    mt = 1j * grid.xi_theta[:, None] * np.ones((1, grid.n_z))
    mz = 1j * np.ones((grid.n_theta, 1)) * grid.xi_z[None, :]
    mt[grid.n_theta // 2, :] = 0.0
    mz[:, grid.n_z // 2] = 0.0
    return mt, mz


def _apply_w(stack, mult):
    """Apply a (theta,z) Fourier multiplier to each rho-layer of a stack."""
    c = np.fft.fft2(stack, axes=(1, 2))
    return np.fft.ifft2(c * mult, axes=(1, 2)).real


class DtnSolver:
    """Dirichlet-to-Neumann solver on a fixed torus grid.

    Holds the radial discretization and a preconditioner built from the
    energy form frozen at the mean radius; the preconditioner is rebuilt
    automatically when the mean radius drifts by more than 2%.
    Instances are safe for concurrent read-only use once constructed; a
    solve mutates only local state plus the cached preconditioner.
    """

    def __init__(self, grid: TorusGrid, n_rho=48):
        self.grid = grid
        self.radial = RadialGrid(n_rho)
        self.n_rho = n_rho
        self._mt, self._mz = _w_multipliers(grid)
        nzr = grid.n_z // 2 + 1
        self._rmt = self._mt[:, :nzr].copy()
        self._rmz = self._mz[:, :nzr].copy()
        m_eff = grid.xi_theta.copy()
        m_eff[grid.n_theta // 2] = 0.0
        k_eff = grid.xi_z.copy()
        k_eff[grid.n_z // 2] = 0.0
        m2 = (m_eff ** 2)[:, None] * np.ones((1, grid.n_z))
        k2 = np.ones((grid.n_theta, 1)) * (k_eff ** 2)[None, :]
        pairs = np.stack([m2.ravel(), k2.ravel()], axis=1)
        uniq, inverse = np.unique(pairs, axis=0, return_inverse=True)
        self._class_values = uniq
        self._class_index = inverse.reshape(grid.n_theta, grid.n_z)
        rho, w, D = self.radial.nodes, self.radial.weights, self.radial.D
        self._A0 = D.T @ np.diag(w * rho) @ D
        self._A1 = np.diag(w / rho)
        self._B = np.diag(w * rho)
        self._precond = None  # (eta_bar, gathered inverse stack)

    # -- preconditioner ----------------------------------------------------
    def _ensure_precond(self, eta_bar):
        if self._precond is not None:
            cached_bar = self._precond[0]
            if abs(eta_bar - cached_bar) <= 0.02 * cached_bar:
                return
        ni = self.n_rho - 1
        cw = self.grid.cell_area
        mats = np.empty((len(self._class_values), ni, ni))
        for idx, (m2, k2) in enumerate(self._class_values):
            M = cw * (self._A0 + m2 * self._A1 + (eta_bar ** 2) * k2 * self._B)
            mats[idx] = M[:ni, :ni]
        scale = 1.0 / np.sqrt(np.einsum("cii->ci", mats))
        mats *= scale[:, :, None] * scale[:, None, :]
        invs = np.linalg.inv(mats)
        invs *= scale[:, :, None] * scale[:, None, :]
        nzr = self.grid.n_z // 2 + 1
        idx = self._class_index[:, :nzr].ravel()
        gathered = invs[idx]                 # (n_theta*nzr, ni, ni)
        self._precond = (eta_bar, np.ascontiguousarray(gathered))

    def _apply_precond(self, r):
        """Per-mode frozen-coefficient solve of an interior residual stack."""
        gathered = self._precond[1]          # (n_theta*nzr, ni, ni)
        ni = r.shape[0]
        nt, nz = self.grid.n_theta, self.grid.n_z
        c = _sfft.rfft2(r, axes=(1, 2))
        flat = c.reshape(ni, -1)
        stacked = np.empty((flat.shape[1], ni, 2))
        stacked[:, :, 0] = flat.real.T
        stacked[:, :, 1] = flat.imag.T
        z = np.matmul(gathered, stacked)     # (n_theta*nzr, ni, 2)
        zc = (z[:, :, 0] + 1j * z[:, :, 1]).T.reshape(c.shape)
        return _sfft.irfft2(zc, axes=(1, 2), s=(nt, nz))

    # -- variable-coefficient energy operator -------------------------------
    def _coefficients(self, eta: TorusField):
        rho = self.radial.nodes[:, None, None]
        e = eta.values[None, :, :]
        et = spectral_derivative(eta, "theta").values[None, :, :]
        ez = spectral_derivative(eta, "z").values[None, :, :]
        c1 = np.broadcast_to(1.0 / e, (self.n_rho,) + eta.values.shape)
        c2 = 1.0 / (rho * e)
        c3 = np.broadcast_to(-et / e ** 2, c1.shape)
        c4 = -rho * ez / e
        mu = (self.radial.weights[:, None, None] * rho) * e ** 2 * self.grid.cell_area
        return c1, c2, c3, c4, mu

    def _strains(self, phi, co):
        c1, c2, c3, c4, _ = co
        nt, nz = self.grid.n_theta, self.grid.n_z
        dphi = np.tensordot(self.radial.D, phi, axes=(1, 0))
        ph = _sfft.rfft2(phi, axes=(1, 2))
        grads = _sfft.irfft2(
            np.stack([ph * self._rmt, ph * self._rmz]), axes=(2, 3), s=(nt, nz)
        )
        e1 = c1 * dphi
        e2 = c2 * grads[0] + c3 * dphi
        e3 = grads[1] + c4 * dphi
        return e1, e2, e3

    def _apply_K(self, phi, co):
        """Full symmetric energy operator on a (n_rho, n_theta, n_z) stack."""
        c1, c2, c3, c4, mu = co
        e1, e2, e3 = self._strains(phi, co)
        g2 = mu * e2
        g3 = mu * e3
        nt, nz = self.grid.n_theta, self.grid.n_z
        out = np.tensordot(
            self.radial.D.T, c1 * (mu * e1) + c3 * g2 + c4 * g3, axes=(1, 0)
        )
        pair = _sfft.rfft2(np.stack([c2 * g2, g3]), axes=(2, 3))
        adj = _sfft.irfft2(
            np.stack([pair[0] * self._rmt, pair[1] * self._rmz]),
            axes=(2, 3), s=(nt, nz),
        )
        out -= adj[0] + adj[1]
        return out

    def energy(self, phi, co):
        """Dirichlet energy 1/2 * a(phi, phi); nonnegative by construction."""
        mu = co[4]
        e1, e2, e3 = self._strains(phi, co)
        return 0.5 * float(np.sum(mu * (e1 ** 2 + e2 ** 2 + e3 ** 2)))

    # -- solve ---------------------------------------------------------------
    def solve(self, eta: TorusField, psi: TorusField, tol=TOL_DEFAULT,
              max_iter=MAX_ITER_DEFAULT) -> PotentialField:
        """Solve the mapped Laplace problem with trace psi on rho = 1."""
        if not TOL_RANGE[0] <= tol <= TOL_RANGE[1]:
            raise ValueError(f"tol must lie in [{TOL_RANGE[0]}, {TOL_RANGE[1]}]")
        if eta.min() <= 0.0:
            raise DomainViolationError("eta must be strictly positive")
        eta = eta.drop_nyquist()
        psi = psi.drop_nyquist()
        co = self._coefficients(eta)
        self._ensure_precond(eta.mean())

        lift = np.broadcast_to(psi.values, (self.n_rho,) + psi.values.shape).copy()
        b_full = -self._apply_K(lift, co)
        b = b_full[:-1]
        bnorm = float(np.sqrt(np.sum(b ** 2)))
        if bnorm == 0.0:
            return PotentialField(self.radial, self.grid, lift, 0, 0.0)

        def K_int(u_int):
            u = np.concatenate([u_int, np.zeros((1,) + u_int.shape[1:])], axis=0)
            return self._apply_K(u, co)[:-1]

        x = np.zeros_like(b)
        r = b.copy()
        z = self._apply_precond(r)
        p = z.copy()
        rz = float(np.sum(r * z))
        res = 1.0
        its = 0
        for its in range(1, max_iter + 1):
            q = K_int(p)
            alpha = rz / float(np.sum(p * q))
            x += alpha * p
            r -= alpha * q
            res = float(np.sqrt(np.sum(r ** 2))) / bnorm
            if res < tol:
                break
            z = self._apply_precond(r)
            rz_new = float(np.sum(r * z))
            p = z + (rz_new / rz) * p
            rz = rz_new
        else:
            raise ConvergenceError(
                f"elliptic solve failed to reach tol {tol:g} in {max_iter} "
                f"iterations (residual {res:.3e})",
                residual=res,
                iterations=max_iter,
            )
        phi = lift
        phi[:-1] += x
        return PotentialField(self.radial, self.grid, phi, its, res)

    # -- trace bundle --------------------------------------------------------
    def trace_bundle(self, eta: TorusField, psi: TorusField, tol=TOL_DEFAULT,
                     max_iter=MAX_ITER_DEFAULT) -> TraceBundle:
        """One elliptic solve and every boundary quantity derived from it."""
        eta = eta.drop_nyquist()
        psi = psi.drop_nyquist()
        pot = self.solve(eta, psi, tol, max_iter)
        co = self._coefficients(eta)
        grid = self.grid

        flux_vals = self._apply_K(pot.values, co)[-1] / grid.cell_area
        flux = TorusField(grid, flux_vals)
        d_rho = TorusField(grid, np.tensordot(self.radial.D[-1], pot.values, axes=(0, 0)))

        B = nonlinear_eval(lambda d, e: d / e, d_rho, eta)
        gbt, gbz = grad_bar_eta(eta)
        psi_trace = pot.trace()
        pt = nonlinear_eval(lambda a, e: a / e,
                            spectral_derivative(psi_trace, "theta"), eta)
        pz = spectral_derivative(psi_trace, "z")
        V_theta = pt - dealiased_product(B, gbt)
        V_z = pz - dealiased_product(B, gbz)
        G = nonlinear_eval(lambda f, e: f / e, flux, eta)
        G_trace = B - dealiased_product(V_theta, gbt) - dealiased_product(V_z, gbz)
        v_dot = dealiased_product(V_theta, gbt) + dealiased_product(V_z, gbz)
        N = dealiased_product(B, v_dot) + 0.5 * (
            dealiased_product(V_theta, V_theta)
            + dealiased_product(V_z, V_z)
            - dealiased_product(B, B)
        )
        ek = self.energy(pot.values, co)
        return TraceBundle(
            d_rho_phi=d_rho, B=B, V_theta=V_theta, V_z=V_z, N=N, G=G,
            G_trace=G_trace, flux=flux, kinetic_energy=ek,
            iterations=pot.iterations, residual=pot.residual,
        )

    def kinetic_energy(self, eta: TorusField, psi: TorusField, tol=TOL_DEFAULT):
        """E_k = 1/2 integral psi (eta G(eta)) psi, as the Dirichlet energy."""
        eta = eta.drop_nyquist()
        psi = psi.drop_nyquist()
        pot = self.solve(eta, psi, tol)
        return self.energy(pot.values, self._coefficients(eta))


@lru_cache(maxsize=8)
def default_solver(grid: TorusGrid, n_rho=48) -> DtnSolver:
    return DtnSolver(grid, n_rho)


def dirichlet_neumann(eta: TorusField, psi: TorusField, n_rho=48,
                      tol=TOL_DEFAULT) -> TraceBundle:
    """Convenience wrapper around a cached solver."""
    return default_solver(eta.grid, n_rho).trace_bundle(eta, psi, tol)


# ---------------------------------------------------------------------------
# shape derivative and Hamiltonian variations
# ---------------------------------------------------------------------------

def shape_derivative(eta: TorusField, psi: TorusField, delta_eta: TorusField,
                     solver: DtnSolver = None, tol=1e-12) -> TorusField:
    """Derivative of G(eta)psi with respect to eta in direction delta_eta:

        -G(eta)(B delta_eta) - d_theta((V_theta/eta) delta_eta)
        - d_z(V_z delta_eta) - B delta_eta / eta.

    Requires two elliptic solves (one for psi, one for the Dirichlet data
    B * delta_eta).
    """
    if solver is None:
        solver = default_solver(eta.grid)
    bundle = solver.trace_bundle(eta, psi, tol)
    data = dealiased_product(bundle.B, delta_eta)
    second = solver.trace_bundle(eta, data, tol)
    q1 = nonlinear_eval(lambda v, d, e: v * d / e, bundle.V_theta, delta_eta, eta)
    q2 = dealiased_product(bundle.V_z, delta_eta)
    last = nonlinear_eval(lambda b, d, e: b * d / e, bundle.B, delta_eta, eta)
    return (
        -second.G
        - spectral_derivative(q1, "theta")
        - spectral_derivative(q2, "z")
        - last
    )


def fd_shape_derivative(eta, psi, delta_eta, eps, solver=None, tol=1e-12):
    """Central finite difference [G(eta+eps d) - G(eta-eps d)] / (2 eps)."""
    if solver is None:
        solver = default_solver(eta.grid)
    plus = solver.trace_bundle(eta + eps * delta_eta, psi, tol).G
    minus = solver.trace_bundle(eta - eps * delta_eta, psi, tol).G
    return (1.0 / (2.0 * eps)) * (plus - minus)


def hamiltonian(state: SurfaceState, solver: DtnSolver = None, tol=TOL_DEFAULT):
    """(E_k, E_p, H_total) of a surface state."""
    if solver is None:
        solver = default_solver(state.grid)
    ek = solver.kinetic_energy(state.eta, state.psi, tol)
    ep = potential_energy(state.eta, state.R, state.sigma)
    return ek, ep, ek + ep


def hamiltonian_variations(eta, psi, delta_p, delta_eta, R, sigma,
                           solver: DtnSolver = None, tol=1e-12,
                           eps_scale=1e-4):
    """Both variational identities of the Hamiltonian formulation.

    Returns (fd_p, analytic_p, fd_eta, analytic_eta) where the FD entries are
    central differences of H(p, eta) = E_k(eta, p/eta) + E_p(eta) in the p-
    and eta-directions at fixed eta resp. fixed p, and the analytic entries
    are

        analytic_p   = integral  G(eta) psi . delta_p,
        analytic_eta = integral (-psi G(eta) psi
                                 + eta (sigma (H - 1/(2R)) + N)) . delta_eta.
    """
    if solver is None:
        solver = default_solver(eta.grid)
    eta = eta.drop_nyquist()
    psi = psi.drop_nyquist()
    delta_p = delta_p.drop_nyquist()
    delta_eta = delta_eta.drop_nyquist()
    p = dealiased_product(eta, psi)

    def total_energy(eta_f, p_f):
        psi_f = nonlinear_eval(lambda a, e: a / e, p_f, eta_f)
        ek = solver.kinetic_energy(eta_f, psi_f, tol)
        return ek + potential_energy(eta_f, R, sigma)

    eps_p = eps_scale * max(p.max_norm(), 1.0) / max(delta_p.max_norm(), 1e-30)
    fd_p = (total_energy(eta, p + eps_p * delta_p)
            - total_energy(eta, p - eps_p * delta_p)) / (2.0 * eps_p)

    eps_e = eps_scale * eta.max_norm() / max(delta_eta.max_norm(), 1e-30)
    fd_eta = (total_energy(eta + eps_e * delta_eta, p)
              - total_energy(eta - eps_e * delta_eta, p)) / (2.0 * eps_e)

    bundle = solver.trace_bundle(eta, psi, tol)
    analytic_p = integrate_product(bundle.G, delta_p)
    H = mean_curvature(eta)
    inner = sigma * (H - 1.0 / (2.0 * R)) + bundle.N
    analytic_eta = (
        -integrate_product(psi, bundle.G, delta_eta)
        + integrate_product(eta, inner, delta_eta)
    )
    return fd_p, analytic_p, fd_eta, analytic_eta
