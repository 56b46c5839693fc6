"""The constructive decomposition v = vbar + V.

Rough initial data made of a power-law cusp a|z|^delta plus an indicator
step sigma chi_(-eta,eta)(z) is split at t = 0; each part then solves its
own LINEAR advection-diffusion system, transported by the full nonlinear
solution.  Because the systems are linear and share the full solution as
driver, the parts sum back to the full velocity at every time, while each
part keeps its own regularity: the cusp part keeps dz vbar in L2, the
step part stays bounded in sup norm.

Run:  python demos/demo_04_velocity_splitting.py
"""

import numpy as np

from hydrostat import (InitialDataSpec, PhysicsParams, StepControl,
                       prepare_initial_parts, run_decomposition)
from hydrostat.estimates import fit_sup_envelope_c0
from hydrostat.spectral import Grid

h = 0.5
grid = Grid.make(32, 32, 64, h)
spec = InitialDataSpec(kind="cusp_step", a=(1.0, 0.0), delta=1.0, eta=0.25,
                       sigma=(0.2, 0.0), epsilon=0.1)
print("initial data: cusp a|z|^delta + step sigma*chi_(-eta,eta)(z)")
print(f"  a = {spec.a}, delta = {spec.delta}, eta = {spec.eta}, "
      f"sigma = {spec.sigma}, mollification radius eps = {spec.epsilon}")

vbar0, V0 = prepare_initial_parts(grid, spec)
run = run_decomposition(vbar0, V0, PhysicsParams(f0=1.0, h=h),
                        StepControl(dt=5e-4), 0.05)
ser = run.series

recon = np.nanmax(ser.array("recon_residual"))
print(f"\nreconstruction residual sup_t ||v - (vbar + V)||_2 / ||v||_2: {recon:.2e}")

linf_V = ser.array("linf_V")
print(f"sup-norm of the step part: {linf_V[0]:.4f} at t=0 -> "
      f"{linf_V[-1]:.4f} at t={ser.array('t')[-1]:.3f} (bounded)")

dz = ser.array("dz_vbar_l2")
print(f"X-regularity of the cusp part: ||dz vbar||_2 = {dz[0]:.4f} -> {dz[-1]:.4f}")
print(f"cumulative int ||grad dz vbar||_2^2: {ser.array('dz_vbar_dissipation')[-1]:.4f}")

c0 = fit_sup_envelope_c0(ser.array("t"), linf_V, linf_V[0], ser.array("l4")[0])
print(f"\nminimal constant making the closed-form growth envelope dominate "
      f"the measured sup norm: {c0:.3e}")

# the final-state pressures of the two parts are recoverable on demand;
# for z-only data they vanish identically (no horizontal structure to push)
pb = run.final.pressure_vbar
pv = run.final.pressure_V
print(f"part pressures at t_end: max |P_vbar| mode = {np.abs(pb.coeffs).max():.2e}, "
      f"max |P_V| mode = {np.abs(pv.coeffs).max():.2e}")
print("(zero for this family: z-only data drives no horizontal pressure "
      "gradients, which is exactly why it stays in the constraint space)")
