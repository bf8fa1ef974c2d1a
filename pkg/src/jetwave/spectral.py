"""Fourier analysis on the 2-torus.

Fields live on a uniform (theta, z) grid with theta-period 2*pi and a
configurable z-period (default 2*pi).  Frequencies are carried explicitly:
xi_theta is an integer lattice, xi_z a multiple of 2*pi/z_period.  The module
provides the exact discrete transform pair, spectral derivatives, dealiased
(zero-padded) products, and a smooth dyadic (Littlewood-Paley) decomposition
with exact telescoping on the lattice.

Conventions
-----------
* Coefficients are normalized so that f(w) = sum_xi c(xi) exp(i w.xi); a
  constant field has c(0) equal to the constant.
* Nyquist columns/rows are zeroed in odd-order derivatives and in every
  symbol application so real fields stay real.
* Quadratic products are dealiased by 3/2 zero padding; they are exact
  whenever the result is resolved on the lattice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np


TAU = 2.0 * np.pi


# ---------------------------------------------------------------------------
# grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TorusGrid:
    """Uniform grid on the (theta, z) torus.

    n_theta, n_z must be even and >= 8.  z_period defaults to 2*pi; a longer
    period makes fractional axial wavenumbers (k = 2*pi/z_period * integer)
    available, which the long-wave Plateau instability needs.
    """

    n_theta: int
    n_z: int
    z_period: float = TAU

    def __post_init__(self):
        for name, n in (("n_theta", self.n_theta), ("n_z", self.n_z)):
            if n < 8 or n % 2 != 0:
                raise ValueError(f"{name} must be an even integer >= 8, got {n}")
        if not self.z_period > 0:
            raise ValueError("z_period must be positive")

    # -- coordinates -------------------------------------------------------
    @property
    def theta(self):
        return np.arange(self.n_theta) * (TAU / self.n_theta)

    @property
    def z(self):
        return np.arange(self.n_z) * (self.z_period / self.n_z)

    def mesh(self):
        """Meshgrid (theta, z) with indexing 'ij' (theta is axis 0)."""
        return np.meshgrid(self.theta, self.z, indexing="ij")

    # -- frequencies -------------------------------------------------------
    @property
    def xi_theta(self):
        """Integer angular frequencies in FFT order."""
        return np.fft.fftfreq(self.n_theta, 1.0 / self.n_theta)

    @property
    def xi_z(self):
        """Axial frequencies (2*pi/z_period times integers) in FFT order."""
        return np.fft.fftfreq(self.n_z, 1.0 / self.n_z) * (TAU / self.z_period)

    def xi_mesh(self):
        return np.meshgrid(self.xi_theta, self.xi_z, indexing="ij")

    @property
    def dz_lattice(self):
        """Spacing of the axial frequency lattice."""
        return TAU / self.z_period

    def nyquist_mask(self):
        """True on modes that must be dropped to keep real fields real."""
        mask = np.zeros((self.n_theta, self.n_z), dtype=bool)
        mask[self.n_theta // 2, :] = True
        mask[:, self.n_z // 2] = True
        return mask

    # -- measures ----------------------------------------------------------
    @property
    def area(self):
        return TAU * self.z_period

    @property
    def cell_area(self):
        return self.area / (self.n_theta * self.n_z)

    def padded(self, factor=1.5):
        """Grid refined by `factor` in both directions (same periods)."""
        mt = int(round(self.n_theta * factor))
        mz = int(round(self.n_z * factor))
        mt += mt % 2
        mz += mz % 2
        return TorusGrid(mt, mz, self.z_period)


def forward_transform(grid: TorusGrid, values):
    """Grid samples -> Fourier coefficients (normalized; c0 = mean)."""
    values = np.asarray(values, dtype=float)
    if values.shape != (grid.n_theta, grid.n_z):
        raise ValueError(
            f"field shape {values.shape} does not match grid "
            f"({grid.n_theta}, {grid.n_z})"
        )
    return np.fft.fft2(values) / (grid.n_theta * grid.n_z)


def inverse_transform(grid: TorusGrid, coefficients):
    """Fourier coefficients -> real grid samples."""
    coefficients = np.asarray(coefficients, dtype=complex)
    if coefficients.shape != (grid.n_theta, grid.n_z):
        raise ValueError(
            f"coefficient shape {coefficients.shape} does not match grid "
            f"({grid.n_theta}, {grid.n_z})"
        )
    return np.fft.ifft2(coefficients).real * (grid.n_theta * grid.n_z)


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------

class TorusField:
    """Real scalar field carried as grid samples plus Fourier coefficients.

    Instances are immutable; all operations return new fields.
    """

    __slots__ = ("grid", "values", "_coefficients")

    def __init__(self, grid: TorusGrid, values, _coefficients=None):
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.n_theta, grid.n_z):
            raise ValueError("field shape does not match grid")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_coefficients", _coefficients)

    def __setattr__(self, *_):
        raise AttributeError("TorusField is immutable")

    # -- constructors ------------------------------------------------------
    @classmethod
    def from_values(cls, grid, values):
        return cls(grid, values)

    @classmethod
    def from_coefficients(cls, grid, coefficients):
        values = inverse_transform(grid, coefficients)
        return cls(grid, values)

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros((grid.n_theta, grid.n_z)))

    @classmethod
    def constant(cls, grid, c):
        return cls(grid, np.full((grid.n_theta, grid.n_z), float(c)))

    @classmethod
    def from_modes(cls, grid, modes):
        """Sum of cosine modes, each given as (amplitude, m, k, phase).

        k must lie on the axial lattice (multiple of 2*pi/z_period).
        """
        th, zz = grid.mesh()
        out = np.zeros_like(th)
        for amp, m, k, phase in modes:
            step = grid.dz_lattice
            if abs(k / step - round(k / step)) > 1e-12:
                raise ValueError(f"k={k} is not on the axial lattice (step {step})")
            out += amp * np.cos(m * th + k * zz + phase)
        return cls(grid, out)

    # -- representation ----------------------------------------------------
    @property
    def coefficients(self):
        if self._coefficients is None:
            c = forward_transform(self.grid, self.values)
            c.setflags(write=False)
            object.__setattr__(self, "_coefficients", c)
        return self._coefficients

    def coefficient(self, m, k_index):
        """Single coefficient addressed by integer lattice indices."""
        return self.coefficients[m % self.grid.n_theta, k_index % self.grid.n_z]

    # -- algebra (pointwise, no dealiasing; use dealiased_product for that) -
    def __add__(self, other):
        if isinstance(other, TorusField):
            self._check(other)
            return TorusField(self.grid, self.values + other.values)
        return TorusField(self.grid, self.values + float(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, TorusField):
            self._check(other)
            return TorusField(self.grid, self.values - other.values)
        return TorusField(self.grid, self.values - float(other))

    def __rsub__(self, other):
        return TorusField(self.grid, float(other) - self.values)

    def __mul__(self, scalar):
        return TorusField(self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return TorusField(self.grid, -self.values)

    def _check(self, other):
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")

    # -- calculus ----------------------------------------------------------
    def derivative(self, direction, order=1):
        return spectral_derivative(self, direction, order)

    # -- reductions --------------------------------------------------------
    def mean(self):
        return float(self.values.mean())

    def integral(self):
        return float(self.values.mean() * self.grid.area)

    def l2_norm(self):
        return float(np.sqrt((self.values ** 2).mean() * self.grid.area))

    def max_norm(self):
        return float(np.abs(self.values).max())

    def min(self):
        return float(self.values.min())

    def max(self):
        return float(self.values.max())

    def shift(self, steps_theta=0, steps_z=0):
        """Translate by whole grid steps (exact)."""
        return TorusField(self.grid, np.roll(self.values, (steps_theta, steps_z), (0, 1)))

    def drop_nyquist(self):
        """Project out the Nyquist rows/columns."""
        c = self.coefficients.copy()
        c[self.grid.nyquist_mask()] = 0.0
        return TorusField.from_coefficients(self.grid, c)


def spectral_derivative(f: TorusField, direction, order=1):
    """d^order/d(direction)^order by Fourier multiplier (i*xi)^order.

    The Nyquist mode is zeroed for odd orders so the result stays real.
    """
    if order < 1 or order > 4:
        raise ValueError("derivative order must be between 1 and 4")
    grid = f.grid
    if direction in ("theta", 0):
        xi = grid.xi_theta[:, None]
        nyq = np.zeros((grid.n_theta, grid.n_z), dtype=bool)
        nyq[grid.n_theta // 2, :] = True
    elif direction in ("z", 1):
        xi = grid.xi_z[None, :]
        nyq = np.zeros((grid.n_theta, grid.n_z), dtype=bool)
        nyq[:, grid.n_z // 2] = True
    else:
        raise ValueError(f"unknown direction {direction!r}")
    mult = (1j * xi) ** order
    mult = np.broadcast_to(mult, (grid.n_theta, grid.n_z)).copy()
    if order % 2 == 1:
        mult[nyq] = 0.0
    return TorusField.from_coefficients(grid, f.coefficients * mult)


# ---------------------------------------------------------------------------
# dealiasing
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def _pad_maps(n_src, n_dst):
    """Index arrays embedding FFT-ordered axes of length n_src into n_dst."""
    freqs = np.fft.fftfreq(n_src, 1.0 / n_src).astype(int)
    return (freqs % n_dst,)


def pad_coefficients(grid: TorusGrid, coefficients, fine: TorusGrid):
    """Embed coefficients into the lattice of a finer grid (zero padding)."""
    (it,) = _pad_maps(grid.n_theta, fine.n_theta)
    (iz,) = _pad_maps(grid.n_z, fine.n_z)
    out = np.zeros((fine.n_theta, fine.n_z), dtype=complex)
    out[np.ix_(it, iz)] = coefficients
    return out


def truncate_coefficients(fine: TorusGrid, coefficients, grid: TorusGrid):
    """Restrict coefficients of a finer grid back to the coarse lattice."""
    (it,) = _pad_maps(grid.n_theta, fine.n_theta)
    (iz,) = _pad_maps(grid.n_z, fine.n_z)
    return coefficients[np.ix_(it, iz)]


def pad_values(f: TorusField, fine: TorusGrid):
    """Sample a field on a finer grid via its Fourier interpolant."""
    c = pad_coefficients(f.grid, f.coefficients, fine)
    return inverse_transform(fine, c)


def nonlinear_eval(fn, *fields, factor=1.5):
    """Evaluate a pointwise function of several fields on a padded grid.

    The inputs are spectrally interpolated onto a grid refined by `factor`,
    fn is applied pointwise there, and the result is truncated back.  For a
    product of two fields with 3/2 padding this is exact dealiasing; for
    general nonlinearities (quotients, roots) it removes the dominant
    aliasing contributions.
    """
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise ValueError("fields live on different grids")
    fine = grid.padded(factor)
    vals = [pad_values(f, fine) for f in fields]
    out = fn(*vals)
    c = np.fft.fft2(out) / (fine.n_theta * fine.n_z)
    return TorusField.from_coefficients(grid, truncate_coefficients(fine, c, grid))


def dealiased_product(f: TorusField, g: TorusField):
    """Pointwise product, dealiased by 3/2 zero padding.

    Exact (equal to the truncated lattice convolution) for any resolved
    inputs; in particular exact with no truncation whenever the combined
    bandwidth fits on the lattice.
    """
    return nonlinear_eval(lambda a, b: a * b, f, g)


def integrate_product(*fields):
    """Integral over the torus of a pointwise product of fields.

    Uses 2x zero padding, which makes the trapezoid rule exact for products
    of up to four Nyquist-free fields.
    """
    grid = fields[0].grid
    fine = grid.padded(2.0)
    prod = pad_values(fields[0], fine)
    for f in fields[1:]:
        prod = prod * pad_values(f, fine)
    return float(prod.mean() * grid.area)


# ---------------------------------------------------------------------------
# dyadic (Littlewood-Paley) decomposition
# ---------------------------------------------------------------------------

def _smooth_step(t):
    """C^inf ramp: 0 for t<=0, 1 for t>=1, strictly monotone between."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        b = np.where(1 - t > 0, np.exp(-1.0 / np.where(1 - t > 0, 1 - t, 1.0)), 0.0)
    return a / (a + b)


def chi_profile(r):
    """Radial low-pass profile: 1 on r<=1, 0 on r>=2, smooth monotone ramp.

    This fixed choice (exp(-1/t) gluing) is documented for reproducibility;
    any smooth monotone ramp would do.
    """
    r = np.abs(np.asarray(r, dtype=float))
    return _smooth_step(2.0 - r)


def annulus_profile(r):
    """phi(r) = chi(r/2) - chi(r); supported on 1 <= r <= 4."""
    return chi_profile(np.asarray(r) / 2.0) - chi_profile(r)


class DyadicDecomposition:
    """Dyadic frequency blocks Delta_j and low passes S_j on a fixed grid.

    Delta_j multiplies coefficients by phi(xi/2^j) and S_j by chi(xi/2^j),
    where phi(r) = chi(r/2) - chi(r).  Because phi is defined by differencing
    chi, the partition telescopes exactly on the lattice:

        chi(xi) + sum_{k=0}^{j-1} phi(xi/2^k) = chi(xi/2^j),

    and S_{jmax+1} = identity on every resolved frequency.
    """

    def __init__(self, grid: TorusGrid):
        self.grid = grid
        xt, xz = grid.xi_mesh()
        self._radii = np.sqrt(xt ** 2 + xz ** 2)
        rmax = float(self._radii.max())
        j = 0
        while np.any(annulus_profile(self._radii / 2.0 ** j) != 0.0):
            j += 1
        # largest index whose annulus still meets the lattice
        self.jmax = j - 1
        self._blocks = {}
        self._lowpass = {}

    def block_multiplier(self, j):
        if j not in self._blocks:
            m = annulus_profile(self._radii / 2.0 ** j)
            m.setflags(write=False)
            self._blocks[j] = m
        return self._blocks[j]

    def lowpass_multiplier(self, j):
        if j not in self._lowpass:
            m = chi_profile(self._radii / 2.0 ** j)
            m.setflags(write=False)
            self._lowpass[j] = m
        return self._lowpass[j]

    def block(self, f: TorusField, j):
        if j < 0 or j > self.jmax:
            raise ValueError(f"block index {j} outside [0, {self.jmax}]")
        return TorusField.from_coefficients(
            self.grid, f.coefficients * self.block_multiplier(j)
        )

    def low_pass(self, f: TorusField, j):
        if j < 0 or j > self.jmax + 1:
            raise ValueError(f"low-pass index {j} outside [0, {self.jmax + 1}]")
        return TorusField.from_coefficients(
            self.grid, f.coefficients * self.lowpass_multiplier(j)
        )


@lru_cache(maxsize=16)
def decomposition(grid: TorusGrid) -> DyadicDecomposition:
    return DyadicDecomposition(grid)


def dyadic_block(f: TorusField, j):
    """Delta_j f (annulus projection around |xi| ~ 2^j)."""
    return decomposition(f.grid).block(f, j)


def low_pass(f: TorusField, j):
    """S_j f (smooth cutoff to |xi| <~ 2^(j+1))."""
    return decomposition(f.grid).low_pass(f, j)


# ---------------------------------------------------------------------------
# seeded random fields (shared by property tests and the verification CLI)
# ---------------------------------------------------------------------------

def band_limited_random(grid: TorusGrid, rng, kmax=4, decay=2.0, max_norm=1.0,
                        zero_mean=True):
    """Random smooth real field with |xi| <= kmax and geometric mode decay.

    Normalized so the sup norm equals max_norm.  Deterministic for a given
    rng state.
    """
    xt, xz = grid.xi_mesh()
    radii = np.sqrt(xt ** 2 + xz ** 2)
    c = rng.standard_normal(radii.shape) + 1j * rng.standard_normal(radii.shape)
    c *= decay ** (-radii)
    c[radii > kmax] = 0.0
    c[grid.nyquist_mask()] = 0.0
    if zero_mean:
        c[0, 0] = 0.0
    else:
        c[0, 0] = c[0, 0].real
    # enforce conjugate symmetry so the field is real
    it = (-np.fft.fftfreq(grid.n_theta, 1 / grid.n_theta).astype(int)) % grid.n_theta
    iz = (-np.fft.fftfreq(grid.n_z, 1 / grid.n_z).astype(int)) % grid.n_z
    c = 0.5 * (c + np.conj(c[np.ix_(it, iz)]))
    f = TorusField.from_coefficients(grid, c)
    m = f.max_norm()
    if m == 0.0:
        return f
    return f * (max_norm / m)
