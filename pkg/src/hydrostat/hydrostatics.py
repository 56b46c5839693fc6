"""Layer-specific operators: vertical integrals, vertical velocity,
barotropic projection and the 2D hydrostatic pressure solve.

The vertical velocity is diagnostic: w = -div_h integral_{-h}^{z} v dxi.
Periodicity of w requires the barotropic constraint
div_h integral_{-h}^{h} v dz = 0, which is enforced here by a Leray-type
projection acting on the z-mean mode alone.

Pressure depends on the horizontal position only and is recovered at every
evaluation from the instantaneous velocity through a 2D Poisson problem
with zero-mean gauge; it is never integrated as a dynamic variable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ConstraintViolationError
from .spectral import (EVEN, ODD, Grid, PhysicalField, SpectralField,
                       div_h, l2_norm, symmetrize, to_physical)

CONSTRAINT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Pressure2D:
    """Horizontal-mode coefficients of a z-independent scalar, zero-mean gauge."""

    grid: Grid
    coeffs: np.ndarray      # (nxr, ny) complex
    zero_mean: bool = True

    def __post_init__(self):
        nxr, ny = self.grid.spectral_shape[:2]
        if self.coeffs.shape != (nxr, ny):
            raise ConfigurationError(
                f"pressure coefficients {self.coeffs.shape} do not match grid")
        if self.zero_mean and self.coeffs[0, 0] != 0:
            raise ConfigurationError("zero-mean gauge violated")

    def __add__(self, other):
        return Pressure2D(self.grid, self.coeffs + other.coeffs,
                          self.zero_mean and other.zero_mean)

    def as_field(self) -> SpectralField:
        """Embed as a z-independent scalar SpectralField (even in z)."""
        out = np.zeros((1,) + self.grid.spectral_shape, dtype=complex)
        out[0, :, :, 0] = self.coeffs
        return SpectralField(self.grid, out, EVEN)


@dataclass(frozen=True, eq=False)
class PressureSplit:
    """Total pressure and its advective / Coriolis parts: total = p1 + p2."""

    total: Pressure2D
    advective: Pressure2D
    coriolis: Pressure2D


def zmean_coeffs(f: SpectralField) -> np.ndarray:
    """The l = 0 plane of the coefficients: the z-average per horizontal mode."""
    return f.coeffs[..., 0]


@dataclass(frozen=True, eq=False)
class BarotropicMode:
    """The z-average <v> of a horizontal velocity, as horizontal modes."""

    grid: Grid
    coeffs: np.ndarray      # (2, nxr, ny) complex

    def divergence_norm(self) -> float:
        """L2 size of div_h <v>; vanishes to round-off after projection."""
        g = self.grid
        d = (1j * g.kx_d[..., 0] * self.coeffs[0]
             + 1j * g.ky_d[..., 0] * self.coeffs[1])
        return np.sqrt(float(g.volume * np.sum(g.mode_weights[..., 0]
                                               * np.abs(d) ** 2)))


def barotropic_mode(v: SpectralField) -> BarotropicMode:
    if v.ncomp != 2:
        raise ConfigurationError("barotropic mode needs a 2-component field")
    return BarotropicMode(v.grid, zmean_coeffs(v).copy())


def barotropic_residual(v: SpectralField) -> float:
    """Relative L2 size of div_h <v> against ||v||_2 (absolute for tiny v)."""
    if v.ncomp != 2:
        raise ConfigurationError("barotropic residual needs a 2-component field")
    g = v.grid
    u = zmean_coeffs(v)
    d = 1j * g.kx_d[..., 0] * u[0] + 1j * g.ky_d[..., 0] * u[1]
    res = np.sqrt(float(g.volume * np.sum(g.mode_weights[..., 0] * np.abs(d) ** 2)))
    return res / max(l2_norm(v), 1.0)


def project_barotropic(v: SpectralField) -> SpectralField:
    """Remove the gradient part of the z-mean mode; baroclinic modes untouched."""
    if v.ncomp != 2:
        raise ConfigurationError("projection needs a 2-component field")
    g = v.grid
    coeffs = v.coeffs.copy()
    u = coeffs[..., 0]
    kx, ky = g.kx_d[..., 0], g.ky_d[..., 0]
    div = 1j * (kx * u[0] + ky * u[1])
    kh2 = np.where(g.kh2 > 0, g.kh2, 1.0)
    q = np.where(g.kh2 > 0, -div / kh2, 0.0)
    u[0] -= 1j * kx * q
    u[1] -= 1j * ky * q
    return SpectralField(g, coeffs, v.symmetry)


def vertical_integral(f: SpectralField, require_periodic: bool = True,
                      tol: float = CONSTRAINT_TOL,
                      reference_norm: float | None = None) -> SpectralField:
    """Antiderivative from -h to z of an even-in-z field.

    Coefficients are divided by i*kz for l != 0; the l = 0 plane is fixed by
    requiring the result to vanish at z = -h.  A z-mean (l = 0) component of
    the integrand would grow linearly in z; if its norm exceeds
    ``tol * reference_norm`` while a periodic result is demanded, a
    constraint violation is raised, otherwise it is silently dropped.
    """
    if f.symmetry != EVEN:
        raise ConfigurationError("vertical integral is defined for even-in-z input")
    g = f.grid
    mean_plane = zmean_coeffs(f)
    if require_periodic:
        res = np.sqrt(float(g.volume * np.sum(g.mode_weights[..., 0]
                                              * np.abs(mean_plane) ** 2)))
        ref = reference_norm if reference_norm is not None else l2_norm(f)
        if res > tol * max(ref, 1.0):
            raise ConstraintViolationError(
                "nonzero z-mean: antiderivative would grow linearly", res / max(ref, 1.0))

    kz = g.kz_d
    inv = np.where(kz != 0, 1.0 / np.where(kz != 0, kz, 1.0), 0.0)
    anti = f.coeffs * (-1j) * inv          # c / (i kz), zero where kz table is 0

    # l = 0 plane from F(-h) = 0; the lattice origin is the wall z = -h,
    # where every basis phase equals one, so F(-h) is the plain sum.
    anti[..., 0] = -np.sum(anti, axis=-1)
    out = SpectralField(g, anti, ODD)
    return symmetrize(out, ODD)


def recover_w(v: SpectralField, tol: float = CONSTRAINT_TOL) -> SpectralField:
    """Vertical velocity w = -div_h integral_{-h}^{z} v, odd in z.

    Requires the barotropic constraint to hold to ``tol`` (relative, L2);
    the residual below tolerance is projected away so that w is periodic
    and vanishes at both walls.
    """
    if v.ncomp != 2:
        raise ConfigurationError("recover_w needs a 2-component field")
    if v.symmetry != EVEN:
        raise ConfigurationError("recover_w needs an even-in-z field")
    res = barotropic_residual(v)
    if res > tol:
        raise ConstraintViolationError("barotropic constraint violated", res)
    s = div_h(v)
    integral = vertical_integral(s, require_periodic=False)
    return integral.with_coeffs(-integral.coeffs, symmetry=ODD)


def boundary_trace_norm(w: SpectralField) -> float:
    """L2(M) norm of w evaluated on the walls z = +/-h (equal by periodicity).

    The wall z = -h is the lattice origin, so the trace is the plain sum of
    coefficients along l.
    """
    g = w.grid
    trace = np.sum(w.coeffs, axis=-1)
    return np.sqrt(float(np.sum(g.mode_weights[..., 0] * np.abs(trace) ** 2)))


def poisson_h_solve(grid: Grid, rhs_coeffs: np.ndarray) -> Pressure2D:
    """Solve -Lap_H p = rhs for a horizontal-mode RHS, zero-mean gauge."""
    kh2 = np.where(grid.kh2 > 0, grid.kh2, 1.0)
    p = np.where(grid.kh2 > 0, rhs_coeffs / kh2, 0.0)
    return Pressure2D(grid, p)


def _zmean_spectrum(values2d_mean, grid):
    """Horizontal spectrum of a z-averaged lattice field.

    Equals the l = 0 plane of the full 3D forward transform (the forward
    normalization makes the l = 0 coefficient the z-average per mode).
    """
    return np.fft.rfftn(values2d_mean, axes=(1, 0), norm="forward")


def _advection_tensor_zmean(u: SpectralField, u_phys: PhysicalField,
                            drv_phys: PhysicalField) -> np.ndarray:
    """z-averaged div_H div_H of the mixed tensor u (x) v_driver, spectral, dealiased."""
    g = u.grid
    out = np.zeros(g.spectral_shape[:2], dtype=complex)
    kx, ky = g.kx_d[..., 0], g.ky_d[..., 0]
    kk = ((kx * kx, kx * ky), (kx * ky, ky * ky))
    mask = g.dealias_mask[..., 0]
    same = drv_phys is u_phys
    for i in range(2):
        for j in range(2):
            if same and (i, j) == (1, 0):
                continue        # T21 == T12 bit for bit when u drives itself
            prod_mean = np.mean(u_phys.values[i] * drv_phys.values[j], axis=2)
            t_hat = _zmean_spectrum(prod_mean, g) * mask
            weight = 2.0 if same and (i, j) == (0, 1) else 1.0
            out -= weight * kk[i][j] * t_hat
    return out


def pressure_rhs_parts(u: SpectralField, driver: SpectralField, f0: float,
                       u_phys: PhysicalField | None = None,
                       driver_phys: PhysicalField | None = None):
    """Horizontal-mode RHS of the two pressure Poisson problems.

    ``u`` is the advected field and ``driver`` the advecting one (they
    coincide for the full nonlinear system).  Returns (advective, coriolis)
    RHS coefficient arrays for -Lap_H p = rhs.
    """
    g = u.grid
    if u_phys is None:
        u_phys = to_physical(u)
    if driver_phys is None:
        driver_phys = u_phys if driver is u else to_physical(driver)
    rhs1 = _advection_tensor_zmean(u, u_phys, driver_phys)
    um = zmean_coeffs(u)
    kx, ky = g.kx_d[..., 0], g.ky_d[..., 0]
    rhs2 = f0 * 1j * (ky * um[0] - kx * um[1])
    return rhs1, rhs2


def solve_pressure(v: SpectralField, f0: float,
                   driver: SpectralField | None = None,
                   v_phys: PhysicalField | None = None,
                   driver_phys: PhysicalField | None = None) -> PressureSplit:
    """Hydrostatic pressure with its advective/Coriolis split, p = p1 + p2.

    With ``driver`` supplied, solves the linear-system analogue where the
    advection tensor is v (x) driver; otherwise the full quadratic problem.
    """
    if v.ncomp != 2:
        raise ConfigurationError("pressure solve needs a 2-component field")
    drv = v if driver is None else driver
    rhs1, rhs2 = pressure_rhs_parts(v, drv, f0, v_phys, driver_phys)
    p1 = poisson_h_solve(v.grid, rhs1)
    p2 = poisson_h_solve(v.grid, rhs2)
    total = Pressure2D(v.grid, p1.coeffs + p2.coeffs)
    return PressureSplit(total, p1, p2)


def pressure_gradient_field(p: Pressure2D) -> SpectralField:
    """grad_H p embedded as a 2-component, z-independent (even) field."""
    g = p.grid
    out = np.zeros((2,) + g.spectral_shape, dtype=complex)
    out[0, :, :, 0] = 1j * g.kx_d[..., 0] * p.coeffs
    out[1, :, :, 0] = 1j * g.ky_d[..., 0] * p.coeffs
    return SpectralField(g, out, EVEN)
