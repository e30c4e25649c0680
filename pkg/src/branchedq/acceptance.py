"""End-to-end acceptance checks, one per pinned numerical claim.

Every check returns (passed, detail) where detail carries the measured
numbers, so failures are diagnosable from the one-line report.  The
registry keeps them in a fixed order; `run_acceptance` never raises, it
converts crashes into failed results.
"""

import time
from dataclasses import dataclass

import numpy as np

from .classical import ClassicalState, integrate_euler_lagrange, integrate_hamilton
from .dispersion import DispersionLaw
from .evolution import MultiWave, continuity_residual, propagate
from .graphs import (Edge, HalfLine, MetricGraph, VertexCondition, box_graph,
                     compton_graph, count_conditions, graph_hamiltonian,
                     star_graph, star_secular_spectrum)
from .grids import FoldedGrid, LineGrid, PeriodicGrid
from .operators import (StencilSymbol, build_convolution_hamiltonian,
                        build_convolution_potential, build_dual_wire_hamiltonian,
                        build_folded_hamiltonian, build_unfolded_hamiltonian,
                        fourier_conjugate_hamiltonian, hermiticity_defect)
from .potentials import GaussianPotential, QuadraticPotential, QuarticPotential
from .spectra import (OperatorBasis, newton_refine, solve_eigensystem,
                      stationarity_residual, variance_minimize)

SEED = 20260814


@dataclass
class CriterionResult:
    cid: str
    title: str
    passed: bool
    detail: str
    elapsed: float

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"{self.cid} {flag} ({self.elapsed:.1f}s) {self.title}: {self.detail}"


def criterion_trichotomy():
    rng = np.random.default_rng(SEED)
    kappas = 10.0 ** rng.uniform(-0.7, 0.7, 10000)
    fracs = rng.uniform(-3.0, 3.0, 10000)
    worst = 0.0
    bad_counts = 0
    for kappa, frac in zip(kappas, fracs):
        law = DispersionLaw(kappa=float(kappa))
        p = float(frac * law.p_plus)
        roots = law.invert_momentum(p)
        snap = 1e-12 * max(1.0, law.p_plus)
        if min(abs(p - law.p_plus), abs(p - law.p_minus)) <= snap:
            expected = 3
        elif abs(p) < law.p_plus:
            expected = 3
        else:
            expected = 1
        if len(roots) != expected:
            bad_counts += 1
        for _, v in roots:
            worst = max(worst, abs(v**3 - kappa * v - p))
    ok = bad_counts == 0 and worst <= 1e-10
    return ok, (f"10000 draws, {bad_counts} wrong root counts, "
                f"max cubic residual {worst:.2e} (tol 1e-10)")


def criterion_hermiticity():
    law = DispersionLaw(kappa=3.0)
    grid = FoldedGrid(law, 201, 300)
    line = LineGrid(-20.0, 20.0, 800)
    asym = GaussianPotential(2.0, 1.0, 1.5)

    weighted = MetricGraph(
        ["c0", "a", "b", "c"],
        [Edge("c0", "a", 1.0, 1.0, 1.0), Edge("c0", "b", 1.0, 1.0, 1.0),
         Edge("c0", "c", 1.0, 1.0, -1.0)],
        conditions={"a": VertexCondition("dirichlet"),
                    "b": VertexCondition("dirichlet"),
                    "c": VertexCondition("dirichlet"),
                    "c0": VertexCondition("weighted",
                                          (1.0, 1.0, np.sqrt(2.0)))})

    cases = [
        ("folded quadratic", build_folded_hamiltonian(
            law, grid, QuadraticPotential(1.0))),
        ("folded quartic", build_folded_hamiltonian(
            law, grid, QuarticPotential(0.4, 0.3, 0.2))),
        ("dual wire", build_dual_wire_hamiltonian(
            StencilSymbol.from_kinetic(0.2, 0.1, 0.5, 0.3), law, grid)),
        ("hermitian convolution", build_convolution_hamiltonian(
            law, asym, line, mode="hermitian")),
        ("kirchhoff graph", graph_hamiltonian(star_graph(3, 1.0), 266)),
        ("weighted graph", graph_hamiltonian(weighted, 266)),
    ]
    details = []
    ok = True
    for name, op in cases:
        defect = hermiticity_defect(op)
        scale = float(np.max(np.abs(op.matrix)))
        good = defect < 1e-12 * scale
        ok = ok and good
        details.append(f"{name} {defect:.1e}/{1e-12 * scale:.1e}")

    n1 = hermiticity_defect(build_folded_hamiltonian(
        law, grid, QuarticPotential(0.4, 0.3, 0.2), flip_reversed_branch=False))
    n2 = hermiticity_defect(build_convolution_potential(
        asym, line, mode="naive", domain=law))
    neg_ok = n1 > 1e-3 and n2 > 1e-3
    ok = ok and neg_ok
    details.append(f"controls unflipped {n1:.1e}, windowed-asymmetric {n2:.1e}")
    return ok, "; ".join(details)


def _matching_line(grid):
    u0, u1 = grid.u[0], grid.u[-1]
    return LineGrid(u0 - grid.h, u1 + grid.h, grid.size)


def criterion_fold_unfold():
    law = DispersionLaw(kappa=3.0)
    details = []
    ok = True
    for name, V in (("quadratic", QuadraticPotential(1.0)),
                    ("quartic", QuarticPotential(0.4, 0.3, 0.2))):
        fg = FoldedGrid(law, 501, 750)
        hf = build_folded_hamiltonian(law, fg, V)
        hu = build_unfolded_hamiltonian(law, _matching_line(fg), V)
        wf = solve_eigensystem(hf, k=10).eigenvalues
        wu = solve_eigensystem(hu, k=10).eigenvalues
        gap = float(np.max(np.abs(wf - wu)))
        ok = ok and gap < 1e-8
        details.append(f"{name} max deviation {gap:.1e}")

    grounds = []
    for n_inner, n_arm in ((125, 188), (250, 375), (500, 749)):
        fg = FoldedGrid(law, n_inner, n_arm)
        op = build_folded_hamiltonian(law, fg, QuadraticPotential(1.0))
        grounds.append(solve_eigensystem(op, k=1).eigenvalues[0])
    slope = float(np.log2((grounds[0] - grounds[1]) /
                          (grounds[1] - grounds[2])))
    ok = ok and 1.8 <= slope <= 2.2
    details.append(f"dyadic order {slope:.3f}")
    return ok, "; ".join(details)


def criterion_known_spectra():
    grid = LineGrid(-10.0, 10.0, 4000)
    op = build_dual_wire_hamiltonian(StencilSymbol.from_kinetic(0, 0, 0.5, 0),
                                     QuadraticPotential(1.0), grid, accuracy=4)
    w = solve_eigensystem(op, k=5).eigenvalues
    target = np.arange(5) + 0.5
    oscil = float(np.max(np.abs(w - target)))

    box = LineGrid(0.0, np.pi, 2000)
    op4 = build_dual_wire_hamiltonian(StencilSymbol.from_kinetic(1, 0, 0, 0),
                                      None, box)
    w4 = solve_eigensystem(op4, k=5).eigenvalues
    quartic = np.arange(1, 6) ** 4
    rel = float(np.max(np.abs(w4 - quartic) / quartic))

    ok = oscil < 1e-6 and rel < 1e-3
    return ok, (f"oscillator levels off by {oscil:.1e} (tol 1e-6); "
                f"clamped-box levels off by {rel:.1e} relative (tol 1e-3)")


def _continuity_peak(op, wave, dt, steps):
    w = wave
    worst = 0.0
    for _ in range(steps):
        nxt, _ = propagate(op, w, dt, 1, stability_budget=None)
        r = continuity_residual(op, w.data, nxt.data, dt)
        worst = max(worst, float(np.max(np.abs(r))))
        w = nxt
    return worst


def criterion_unitarity_flux():
    law = DispersionLaw(kappa=3.0)
    details = []
    ok = True
    quartic_symbol = StencilSymbol.from_quartic_potential(0.3, 0.5, 0.2).scaled(0.01)
    # Packets start deep in an arm with a gentle boost: cusp-crossing
    # dynamics are out of scope, so the flux bound is checked while the
    # junction amplitude stays at discretization-noise level.
    runs = [
        ("quadratic", QuadraticPotential(1.0), (40, 140), (80, 279), -10.0, 0.5),
        ("quartic", quartic_symbol, (8, 36), (16, 71), -10.0, 0.5),
    ]
    for name, V, coarse, fine, center, boost in runs:
        fg = FoldedGrid(law, *coarse)
        op = build_folded_hamiltonian(law, fg, V)
        wave = MultiWave.gaussian(fg, center, 1.0, boost=boost)
        _, rep = propagate(op, wave, 1e-3, 1000)
        drift = rep.norm_drift
        flux = rep.max_flux_residual
        ok = ok and drift < 1e-10 and flux < 1e-8
        details.append(f"{name} norm drift {drift:.1e}, flux {flux:.1e}")

        r_h = _continuity_peak(op, wave, 1e-3, 10)
        fgf = FoldedGrid(law, *fine)
        opf = build_folded_hamiltonian(law, fgf, V)
        wavef = MultiWave.gaussian(fgf, center, 1.0, boost=boost)
        r_h2 = _continuity_peak(opf, wavef, 1e-3, 10)
        r_dt2 = _continuity_peak(op, wave, 5e-4, 20)
        slope = float(np.log2(r_h / r_h2))
        dt_ratio = r_dt2 / r_h
        ok = ok and 1.5 <= slope <= 2.5 and 0.7 <= dt_ratio <= 1.4
        details.append(f"{name} continuity h-order {slope:.2f}, "
                       f"dt-halving ratio {dt_ratio:.2f}")
    return ok, "; ".join(details)


def criterion_condition_counting():
    node_c, inf_c, total_c, const_c = count_conditions(compton_graph())
    node_b, inf_b, total_b, const_b = count_conditions(box_graph())
    ok = (total_c, const_c) == (10, 10) and (total_b, const_b) == (16, 16)
    ok = ok and (node_c, inf_c) == (6, 4) and (node_b, inf_b) == (12, 4)

    rng = np.random.default_rng(SEED)
    mismatches = 0
    for _ in range(200):
        nv = int(rng.integers(1, 9))
        vertices = list(range(nv))
        edges = []
        if nv >= 2:
            for _ in range(int(rng.integers(0, 13))):
                u, v = rng.choice(nv, size=2, replace=False)
                edges.append(Edge(int(u), int(v), float(rng.uniform(0.5, 2.0))))
        half = [HalfLine(int(rng.integers(0, nv)))
                for _ in range(int(rng.integers(0, 5)))]
        g = MetricGraph(vertices, edges, half,
                        free_lines=int(rng.integers(0, 3)))
        _, _, total, const = count_conditions(g)
        if total != const:
            mismatches += 1
    ok = ok and mismatches == 0
    return ok, (f"named graphs ({total_c}, {total_b}) conditions; "
                f"fuzz 200 graphs, {mismatches} imbalances")


def criterion_graph_spectra():
    oracle = np.array(star_secular_spectrum(3, 1.0, 7.0)[:6])
    op = graph_hamiltonian(star_graph(3, 1.0), 2000)
    w = solve_eigensystem(op, k=6).eigenvalues
    k_meas = np.sqrt(np.abs(w))
    gap = float(np.max(np.abs(k_meas - oracle)))

    mult_ok = (abs(k_meas[1] - k_meas[2]) < 1e-6 and
               abs(k_meas[4] - k_meas[5]) < 1e-6 and
               k_meas[1] - k_meas[0] > 0.1 and
               k_meas[3] - k_meas[2] > 0.1 and
               k_meas[4] - k_meas[3] > 0.1)

    path = MetricGraph(
        ["a", "m", "b"],
        [Edge("a", "m", np.pi / 2), Edge("m", "b", np.pi / 2)],
        conditions={"a": VertexCondition("dirichlet"),
                    "b": VertexCondition("dirichlet")})
    wp = solve_eigensystem(graph_hamiltonian(path, 2000), k=5).eigenvalues
    trans = float(np.max(np.abs(np.sqrt(np.abs(wp)) - np.arange(1, 6))))

    ok = gap < 1e-4 and mult_ok and trans < 1e-4
    return ok, (f"star wavenumbers off by {gap:.1e} (tol 1e-4), "
                f"multiplicity pattern {'ok' if mult_ok else 'wrong'}; "
                f"pass-through vertex off by {trans:.1e}")


def criterion_eigen_characterizations():
    law = DispersionLaw(kappa=3.0)
    fg = FoldedGrid(law, 40, 60)
    op = build_folded_hamiltonian(law, fg, QuadraticPotential(1.0))
    res = solve_eigensystem(op, k=4)
    basis = OperatorBasis(fg.size)
    rng = np.random.default_rng(SEED)

    worst_e = 0.0
    worst_overlap = 1.0
    for i in range(3):
        exact = res.eigenvectors[:, i]
        noise = (rng.standard_normal(fg.size)
                 + 1j * rng.standard_normal(fg.size))
        # 5% relative perturbation: inside the Newton basin yet large
        # enough that the refiners do real work.
        psi0 = exact + 0.05 * noise / np.linalg.norm(noise)
        psi0 = psi0 / np.linalg.norm(psi0)
        e_n, psi_n = newton_refine(op, psi0, basis, tol=1e-10)
        # The BB descent crawls once the variance is far below the final
        # 1e-6 energy tolerance; 1e-8 leaves the assertions two decades
        # of headroom without burning the iteration cap.
        e_v, psi_v = variance_minimize(op, psi0, tol=1e-8, max_iter=60000)
        for e, psi in ((e_n, psi_n), (e_v, psi_v)):
            worst_e = max(worst_e, abs(e - res.eigenvalues[i]))
            worst_overlap = min(worst_overlap, abs(np.vdot(psi, exact)))

    worst_res = 0.0
    for i in range(4):
        r = stationarity_residual(op, res.eigenvectors[:, i], basis)
        worst_res = max(worst_res, float(np.max(r)))

    ok = worst_e < 1e-6 and worst_overlap > 0.999 and worst_res < 1e-9
    return ok, (f"refined energies off by {worst_e:.1e} (tol 1e-6), "
                f"overlap {worst_overlap:.6f} (need >0.999), "
                f"eigenvector stationarity {worst_res:.1e} (tol 1e-9)")


def criterion_classical_oracles():
    law = DispersionLaw(kappa=3.0)
    bump = GaussianPotential(0.5, 2.0, 0.0)
    rng = np.random.default_rng(SEED)
    t_eval = np.linspace(0.0, 50.0, 501)

    worst_gap = 0.0
    worst_drift = 0.0
    for _ in range(20):
        x0 = float(rng.uniform(-2.0, 2.0))
        v0 = float(rng.choice([-1.0, 1.0]) * rng.uniform(1.8, 2.3))
        state = ClassicalState(x0, v0)
        th = integrate_hamilton(state, 50.0, law, bump, tol=1e-12,
                                t_eval=t_eval)
        te = integrate_euler_lagrange(state, 50.0, law, bump, tol=1e-12,
                                      t_eval=t_eval)
        if th.status != "completed" or te.status != "completed":
            return False, "a supposedly cusp-free run hit an event"
        gap = max(float(np.max(np.abs(th.x - te.x))),
                  float(np.max(np.abs(th.xdot - te.xdot))))
        worst_gap = max(worst_gap, gap)
        worst_drift = max(worst_drift, th.energy_drift(), te.energy_drift())

    halted = integrate_hamilton(ClassicalState(0.0, 2.0), 50.0, law,
                                QuadraticPotential(1.0), policy="halt")
    ev_res = max((abs(3.0 * s.xdot**2 - 3.0) for s in halted.events),
                 default=np.inf)
    ev_ok = halted.status == "halted" and ev_res < 1e-9

    ok = worst_gap < 1e-8 and worst_drift < 1e-8 and ev_ok
    return ok, (f"20 orbits, bracket vs direct sup gap {worst_gap:.1e} "
                f"(tol 1e-8), energy drift {worst_drift:.1e}; cusp event "
                f"degeneracy {ev_res:.1e} (tol 1e-9)")


def criterion_convolution_consistency():
    law = DispersionLaw(kappa=3.0)
    V = GaussianPotential(1.0, 1.0, 0.0)
    line = LineGrid(-20.0, 20.0, 800)
    mh = build_convolution_potential(V, line, mode="hermitian").matrix
    mn = build_convolution_potential(V, line, mode="naive", domain=law).matrix
    entry = float(np.max(np.abs(mh - mn)))
    scale = float(np.max(np.abs(mh)))

    pg = PeriodicGrid(-32.0, 32.0, 256)
    h1 = build_convolution_hamiltonian(law, V, pg, mode="hermitian")
    h2 = fourier_conjugate_hamiltonian(law, V, pg)
    w1 = solve_eigensystem(h1).eigenvalues
    w2 = solve_eigensystem(h2).eigenvalues
    spec_gap = float(np.max(np.abs(w1 - w2)))

    ok = entry <= 1e-15 * scale and spec_gap < 1e-10
    return ok, (f"symmetric naive vs hermitian entrywise gap {entry:.1e} "
                f"(scale {scale:.1e}); position-side spectrum gap "
                f"{spec_gap:.1e} (tol 1e-10)")


CRITERIA = [
    ("C1", "momentum-inversion trichotomy", criterion_trichotomy),
    ("C2", "hermiticity of every assembly", criterion_hermiticity),
    ("C3", "folded vs unfolded spectra", criterion_fold_unfold),
    ("C4", "known reference spectra", criterion_known_spectra),
    ("C5", "unitary evolution and junction flux", criterion_unitarity_flux),
    ("C6", "graph condition counting", criterion_condition_counting),
    ("C7", "graph spectra vs secular oracle", criterion_graph_spectra),
    ("C8", "variational eigenstate characterizations",
     criterion_eigen_characterizations),
    ("C9", "classical bracket vs direct integration",
     criterion_classical_oracles),
    ("C10", "convolution modes and position-side conjugate",
     criterion_convolution_consistency),
]


def run_acceptance(ids=None):
    """Run the registered criteria (all, or a subset of ids) in order."""
    wanted = set(ids) if ids else None
    results = []
    for cid, title, fn in CRITERIA:
        if wanted and cid not in wanted:
            continue
        start = time.perf_counter()
        try:
            passed, detail = fn()
        except Exception as exc:
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append(CriterionResult(cid, title, passed, detail,
                                       time.perf_counter() - start))
    return results
