"""Classical dynamics with a multivalued momentum map.

The Hessian d2L/dxdot2 = 3 xdot**2 - kappa vanishes at the cusp
velocities, where the velocity equation of motion breaks down and the
momentum-side flow must choose among branches.  Three experiments: the
bracket-based flow against the direct velocity-space one on a smooth
orbit, a confining well that drives the velocity into the cusp, and the
seeded random-branch policy that hops between roots of equal momentum.
"""

import numpy as np

from branchedq import (ClassicalState, DispersionLaw, GaussianPotential,
                       QuadraticPotential, integrate_euler_lagrange,
                       integrate_hamilton)

law = DispersionLaw(kappa=3.0)
bump = GaussianPotential(0.5, 2.0, 0.0)
t_eval = np.linspace(0.0, 20.0, 201)

start = ClassicalState(x=-1.0, xdot=2.1)
ham = integrate_hamilton(start, 20.0, law, bump, tol=1e-12, t_eval=t_eval)
lag = integrate_euler_lagrange(start, 20.0, law, bump, tol=1e-12, t_eval=t_eval)
gap = np.max(np.abs(ham.x - lag.x))
print("smooth orbit, bracket flow vs velocity flow:")
print(f"  sup |x_H - x_L| = {gap:.2e} over t in [0, 20]")
print(f"  energy drift     {ham.energy_drift():.2e}")

print()
print("confining well: the velocity is driven into the cusp and halts:")
well = QuadraticPotential(1.0)
traj = integrate_hamilton(ClassicalState(0.0, 2.0), 10.0, law, well,
                          policy="halt",
                          t_eval=np.linspace(0.0, 10.0, 401))
print(f"  status {traj.status!r} at t = {traj.t[-1]:.4f}")
ev = traj.events[0]
print(f"  event state: xdot = {ev.xdot:+.6f}, "
      f"degeneracy |3 xdot^2 - kappa| = {abs(3 * ev.xdot ** 2 - 3.0):.1e}")

print()
print("random-branch policy, seed 7: hop to the far root of the same p:")
traj = integrate_hamilton(ClassicalState(0.0, 2.0), 10.0, law, well,
                          policy="random-branch", seed=7,
                          t_eval=np.linspace(0.0, 10.0, 401))
flags = np.flatnonzero(traj.event_flag)
print(f"  status {traj.status!r}, {len(traj.events)} branch events")
for i in flags[:3]:
    print(f"  t = {traj.t[i]:6.4f}: cusp arrival xdot = {traj.xdot[i]:+.4f} "
          f"(p = {traj.momentum[i]:+.4f}), next sample xdot = "
          f"{traj.xdot[i + 1]:+.4f}, E = {traj.energy[i + 1]:+.4f}")
