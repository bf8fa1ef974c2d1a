"""Bony paraproducts and paradifferential quantization on the torus.

The paraproduct pairs a smoothed low-frequency factor with each dyadic block
of the other argument,

    T_a b = sum_{j >= 2} S_{j-2} a * Delta_j b,

every block product being dealiased.  The remainder R(a, b) closes Bony's
decomposition ab = T_a b + T_b a + R(a, b) exactly (the product on the left
is the dealiased one, so the identity holds to rounding by construction).

Quantization of an (w, xi)-dependent symbol follows the same recipe
frequency by frequency:

    T_a u(w) = sum_xi [ sum_{j>=2} phi(xi/2^j) (S_{j-2} a)(w, xi) ]
               e^{i w.xi} u_hat(xi),

accumulated by direct summation over the lattice -- cost
O(N_lattice * N_grid), accepted at desk scale and preferred over per-block
transform batching because it commits no extra approximation.  The sum is
evaluated on a 3/2 zero-padded grid and truncated, so the output is
dealiased exactly like every other product in the package; blocks beyond the
dealiased band are dropped, the discrete analogue of working with
band-limited fields.  The j-sum starts at j = 2, so low frequencies of the
acted-on field are invisible: T_a (S_1 u) = 0 exactly and constants may be
added to the second argument freely.

The lattice iteration order is fixed, so results are bit-reproducible.
"""

from __future__ import annotations

import numpy as np

from .spectral import (
    TorusField,
    dealiased_product,
    decomposition,
    pad_coefficients,
    truncate_coefficients,
)

_CHUNK = 256


def paraproduct(a: TorusField, b: TorusField) -> TorusField:
    """Bony paraproduct T_a b (low-high part of the product ab)."""
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")
    dec = decomposition(a.grid)
    out = TorusField.zeros(a.grid)
    for j in range(2, dec.jmax + 1):
        block = dec.block(b, j)
        if not np.any(block.coefficients):
            continue
        out = out + dealiased_product(dec.low_pass(a, j - 2), block)
    return out


def bony_remainder(a: TorusField, b: TorusField) -> TorusField:
    """R(a, b) = ab - T_a b - T_b a; symmetric, closes the decomposition."""
    return dealiased_product(a, b) - paraproduct(a, b) - paraproduct(b, a)


def good_unknown(eta: TorusField, psi: TorusField, B: TorusField) -> TorusField:
    """Alinhac's good unknown U = psi - T_B eta."""
    return psi - paraproduct(B, eta)


def apply_paradiff(symbol, u: TorusField) -> TorusField:
    """Apply the paradifferential operator of an (w, xi) symbol to u.

    ``symbol`` is anything with a ``total(xi_theta, xi_z)`` method returning
    the (n_theta, n_z) complex sample of a(., xi) on the grid (see
    symbols.HomogeneousSymbol), or a bare callable with that signature.  For
    real operators the samples must satisfy a(w, -xi) = conj(a(w, xi)); the
    accumulated sum is then real and its real part is returned.
    """
    grid = u.grid
    sample = symbol.total if hasattr(symbol, "total") else symbol
    dec = decomposition(grid)
    fine = grid.padded(1.5)
    xt, xz = grid.xi_mesh()
    uhat = u.coefficients
    nyq = grid.nyquist_mask()

    js = list(range(2, dec.jmax + 1))
    if not js:
        return TorusField.zeros(grid)
    block_w = np.stack([dec.block_multiplier(j) for j in js])        # (J, Nt, Nz)
    low_w = np.stack([dec.lowpass_multiplier(j - 2) for j in js])    # (J, Nt, Nz)
    weight = block_w.sum(axis=0)

    active = np.nonzero((weight != 0.0) & (uhat != 0.0) & ~nyq)
    n_active = active[0].size
    if n_active == 0:
        return TorusField.zeros(grid)

    tt, zz = fine.mesh()
    tt = tt.ravel()
    zz = zz.ravel()
    acc = np.zeros(tt.size, dtype=complex)

    order = np.argsort(np.ravel_multi_index(active, uhat.shape))
    idx_t = active[0][order]
    idx_z = active[1][order]

    for start in range(0, n_active, _CHUNK):
        sl = slice(start, min(start + _CHUNK, n_active))
        its, izs = idx_t[sl], idx_z[sl]
        n = its.size
        samples = np.empty((n, grid.n_theta, grid.n_z), dtype=complex)
        for i in range(n):
            samples[i] = sample(float(xt[its[i], izs[i]]), float(xz[its[i], izs[i]]))
        shat = np.fft.fft2(samples, axes=(1, 2)) / (grid.n_theta * grid.n_z)
        # per-frequency smoothing multiplier: sum_j phi(xi/2^j) chi(zeta/2^(j-2))
        mult = np.einsum("jn,jtz->ntz", block_w[:, its, izs], low_w, optimize=True)
        shat *= mult
        padded = np.stack(
            [pad_coefficients(grid, shat[i], fine) for i in range(n)]
        )
        vals = np.fft.ifft2(padded, axes=(1, 2)) * (fine.n_theta * fine.n_z)
        phases = np.exp(
            1j * (np.outer(xt[its, izs], tt) + np.outer(xz[its, izs], zz))
        )
        acc += np.einsum(
            "np,np,n->p",
            vals.reshape(n, -1),
            phases,
            uhat[its, izs],
            optimize=True,
        )

    vals = acc.real.reshape(fine.n_theta, fine.n_z)
    c = np.fft.fft2(vals) / (fine.n_theta * fine.n_z)
    return TorusField.from_coefficients(grid, truncate_coefficients(fine, c, grid))
