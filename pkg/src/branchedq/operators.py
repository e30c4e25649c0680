"""Finite Hermitian discretizations of branched Hamiltonians.

All stencil-based operators are built from one symbol

    c4 d^4 + i c3 d^3 - c2 d^2 - i c1 d

acting along the grid coordinate, which is the image of a real polynomial
in the conjugate variable: multiplication by x**n in position space turns
into (i d/dxi)**n on the unfolded momentum coordinate, and a kinetic
polynomial in p turns into the same form via p = -i d/dx.  Plane waves
e^{ikx} see the real value c4 k^4 + c3 k^3 + c2 k^2 + c1 k.

Junctions between branches are handled by ghost points: values k steps
past a junction are read from the partner branch k steps in from its end.
Because the orientation-reversed branch carries the sign-flipped odd
coefficients, this single rule enforces matching of the function and its
first three derivatives with alternating parity, and the resulting matrix
coincides with the plain assembly on the unfolded line.  Each junction
equation is the average of the two one-sided assemblies (they agree
exactly under the ghost rule).

Outer ends are Dirichlet.  Second-layer ghosts there are closed by odd
reflection for even-order stencils and by zero for odd-order stencils;
the latter keeps the odd part of the matrix exactly antisymmetric, which
Hermiticity requires, at a cost that is invisible for states decaying at
the boundary.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz, circulant

from .dispersion import BranchedDomain, DispersionLaw
from .grids import BranchSegment, FoldedGrid, LineGrid, PeriodicGrid
from .potentials import KernelSpec, QuadraticPotential, QuarticPotential, has_kernel


@dataclass(frozen=True)
class StencilSymbol:
    """Coefficients (c4, c3, c2, c1) of c4 d^4 + i c3 d^3 - c2 d^2 - i c1 d."""

    c4: float = 0.0
    c3: float = 0.0
    c2: float = 0.0
    c1: float = 0.0

    @classmethod
    def from_quadratic_potential(cls, alpha):
        """V(x) = alpha x^2/2 as an operator on the unfolded momentum line."""
        return cls(0.0, 0.0, 0.5 * alpha, 0.0)

    @classmethod
    def from_quartic_potential(cls, alpha=0.0, beta=0.0, gamma=0.0):
        """V(x) = x^4 + alpha x^3 + beta x^2 + gamma x on the momentum line.

        The same tuple realizes the dual kinetic polynomial
        p^4 - alpha p^3 + beta p^2 - gamma p on a position-space wire.
        """
        return cls(1.0, -alpha, beta, -gamma)

    @classmethod
    def from_kinetic(cls, c4=0.0, c3=0.0, c2=0.0, c1=0.0):
        """Kinetic polynomial c4 p^4 + c3 p^3 + c2 p^2 + c1 p in position space."""
        return cls(c4, c3, c2, c1)

    def flipped(self):
        """Odd-coefficient sign flip for the orientation-reversed branch."""
        return StencilSymbol(self.c4, -self.c3, self.c2, -self.c1)

    def scaled(self, factor):
        return StencilSymbol(factor * self.c4, factor * self.c3,
                             factor * self.c2, factor * self.c1)

    def plane_wave_energy(self, k):
        k = np.asarray(k, dtype=float)
        return ((self.c4 * k + self.c3) * k + self.c2) * k * k + self.c1 * k

    def is_zero(self):
        return self.c4 == self.c3 == self.c2 == self.c1 == 0.0


@dataclass
class OperatorMatrix:
    """Dense discretized Hamiltonian with its provenance and grid."""

    matrix: np.ndarray
    provenance: str
    grid: object
    kernel: KernelSpec = None
    symbol: StencilSymbol = None

    @property
    def shape(self):
        return self.matrix.shape


def as_matrix(op):
    return op.matrix if isinstance(op, OperatorMatrix) else np.asarray(op)


_D1_2 = {-1: -0.5, 1: 0.5}
_D2_2 = {-1: 1.0, 0: -2.0, 1: 1.0}
_D3_2 = {-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5}
_D4_2 = {-2: 1.0, -1: -4.0, 0: 6.0, 1: -4.0, 2: 1.0}
_D1_4 = {-2: 1.0 / 12.0, -1: -8.0 / 12.0, 1: 8.0 / 12.0, 2: -1.0 / 12.0}
_D2_4 = {-2: -1.0 / 12.0, -1: 16.0 / 12.0, 0: -30.0 / 12.0, 1: 16.0 / 12.0, 2: -1.0 / 12.0}


def _stencil_weights(symbol, h, accuracy):
    """Even-order (real) and odd-order (imaginary) weights per offset."""
    if accuracy == 2:
        d1, d2 = _D1_2, _D2_2
    elif accuracy == 4:
        if symbol.c4 != 0.0 or symbol.c3 != 0.0:
            raise ValueError("fourth-order closures exist only for the "
                             "second- and first-derivative terms")
        d1, d2 = _D1_4, _D2_4
    else:
        raise ValueError("accuracy must be 2 or 4")
    even = {}
    odd = {}
    for off, w in d2.items():
        even[off] = even.get(off, 0.0) - symbol.c2 * w / h**2
    for off, w in _D4_2.items():
        if symbol.c4 != 0.0:
            even[off] = even.get(off, 0.0) + symbol.c4 * w / h**4
    for off, w in d1.items():
        odd[off] = odd.get(off, 0.0) - 1j * symbol.c1 * w / h
    for off, w in _D3_2.items():
        if symbol.c3 != 0.0:
            odd[off] = odd.get(off, 0.0) + 1j * symbol.c3 * w / h**3
    even = {k: v for k, v in even.items() if v != 0.0}
    odd = {k: v for k, v in odd.items() if v != 0.0}
    return even, odd


def _resolve(seg, segments, tgt):
    """Map a local target index to [(global col, even factor, odd factor)]."""
    m = len(seg.gidx)
    if 0 <= tgt < m:
        return [(seg.gidx[tgt], 1.0, 1.0)]
    if tgt < 0:
        end, k = seg.left, -tgt
        inner = 0
    else:
        end, k = seg.right, tgt - (m - 1)
        inner = m - 1
    if end[0] == "dirichlet":
        # Boundary node sits at distance 1 and carries value zero.
        if k == 1:
            return []
        if k == 2:
            return [(seg.gidx[inner], -1.0, 0.0)]
        raise ValueError("stencil reaches past the boundary closure")
    _, pb, pend = end
    partner = segments[pb]
    mp = len(partner.gidx)
    if k >= mp:
        raise ValueError("stencil reaches across the partner branch")
    col = partner.gidx[k] if pend == "left" else partner.gidx[mp - 1 - k]
    return [(col, 1.0, 1.0)]


def _assemble_stencil(segments, n_total, h, symbol, accuracy, flip_reversed):
    H = np.zeros((n_total, n_total), dtype=complex)
    if symbol is None or symbol.is_zero():
        return H
    for seg in segments.values():
        sym = symbol.flipped() if (flip_reversed and seg.flip_odd) else symbol
        even, odd = _stencil_weights(sym, h, accuracy)
        offsets = sorted(set(even) | set(odd))
        m = len(seg.gidx)
        for local in range(m):
            rw = seg.row_weight[local]
            if rw == 0.0:
                continue
            row = seg.gidx[local]
            for off in offsets:
                we = even.get(off, 0.0)
                wo = odd.get(off, 0.0)
                for col, fe, fo in _resolve(seg, segments, local + off):
                    H[row, col] += rw * (fe * we + fo * wo)
    return H


def _line_segment(n):
    return {0: BranchSegment(0, np.arange(n), False,
                             ("dirichlet",), ("dirichlet",), np.ones(n))}


def _branchwise_energy(law, p, branch):
    p = np.asarray(p, dtype=float)
    branch = np.asarray(branch)
    out = np.empty(p.shape, dtype=float)
    for b in (1, 2, 3):
        mask = branch == b
        if np.any(mask):
            out[mask] = law.branch_energy(p[mask], b)
    return out


def _unfolded_energy(law, u):
    """Kinetic energy as a function of the unfolded coordinate."""
    if not law.branched:
        return law.energy_of_momentum(u)
    p, branch = law.domain().fold(u)
    return _branchwise_energy(law, p, branch)


def _symbol_of_potential(V):
    if V is None:
        return None
    if isinstance(V, StencilSymbol):
        return V
    if isinstance(V, QuadraticPotential):
        return StencilSymbol.from_quadratic_potential(V.alpha)
    if isinstance(V, QuarticPotential):
        return StencilSymbol.from_quartic_potential(V.alpha, V.beta, V.gamma)
    raise TypeError("stencil assembly needs a polynomial potential or a "
                    "StencilSymbol; decaying wells go through "
                    "build_convolution_potential")


def build_folded_hamiltonian(law, grid, V=None, accuracy=2, flip_reversed_branch=True):
    """Branched Hamiltonian on the folded momentum grid.

    The kinetic energy multiplies on the diagonal; the polynomial
    potential acts through derivative stencils, with odd coefficients
    flipped on branch 2 and junction ghost matching between branches.
    flip_reversed_branch=False assembles the (non-Hermitian) variant
    without the sign flips, kept for negative-control tests.
    """
    if not isinstance(grid, FoldedGrid):
        raise TypeError("build_folded_hamiltonian needs a FoldedGrid")
    symbol = _symbol_of_potential(V)
    H = _assemble_stencil(grid.segments(), grid.size, grid.h,
                          symbol, accuracy, flip_reversed_branch)
    H[np.diag_indices_from(H)] += _branchwise_energy(law, grid.p, grid.branch)
    return OperatorMatrix(H, "folded", grid, symbol=symbol)


def build_unfolded_hamiltonian(law, grid, V=None, accuracy=2):
    """Same Hamiltonian assembled plainly on the unfolded line.

    Accepts the FoldedGrid (for node-by-node comparison against the
    folded assembly) or a LineGrid over the unfolded coordinate; for an
    unbranched law the coordinate is the momentum itself.
    """
    symbol = _symbol_of_potential(V)
    if isinstance(grid, FoldedGrid):
        segments = _line_segment(grid.size)
        diag = _branchwise_energy(law, grid.p, grid.branch)
        h = grid.h
    elif isinstance(grid, LineGrid):
        segments = _line_segment(grid.size)
        diag = _unfolded_energy(law, grid.x)
        h = grid.h
    else:
        raise TypeError("build_unfolded_hamiltonian needs a FoldedGrid or LineGrid")
    H = _assemble_stencil(segments, len(diag), h, symbol, accuracy, False)
    H[np.diag_indices_from(H)] += diag
    return OperatorMatrix(H, "unfolded", grid, symbol=symbol)


def build_dual_wire_hamiltonian(kinetic, W, grid, accuracy=2, flip_reversed_branch=True):
    """Position-space wire: polynomial kinetic stencil, multiplicative W.

    kinetic is a StencilSymbol or (c4, c3, c2, c1) coefficients of the
    momentum polynomial.  On a FoldedGrid, W is branch-resolved: a
    DispersionLaw (its energy curve read as a multivalued potential), a
    {branch: callable} mapping, or a nodal array; the two values meeting
    at each junction must agree.  On a LineGrid, W is a callable, array,
    or None.
    """
    symbol = kinetic if isinstance(kinetic, StencilSymbol) else StencilSymbol.from_kinetic(*kinetic)
    if isinstance(grid, FoldedGrid):
        diag = _dual_wire_diag(W, grid)
        H = _assemble_stencil(grid.segments(), grid.size, grid.h,
                              symbol, accuracy, flip_reversed_branch)
    elif isinstance(grid, LineGrid):
        if W is None:
            diag = np.zeros(grid.size)
        elif callable(W):
            diag = np.asarray(W(grid.x), dtype=float)
        else:
            diag = np.asarray(W, dtype=float)
            if diag.shape != (grid.size,):
                raise ValueError("W array must have one value per grid node")
        H = _assemble_stencil(_line_segment(grid.size), grid.size, grid.h,
                              symbol, accuracy, False)
    else:
        raise TypeError("build_dual_wire_hamiltonian needs a FoldedGrid or LineGrid")
    H[np.diag_indices_from(H)] += diag
    return OperatorMatrix(H, "dual-wire", grid, symbol=symbol)


def _dual_wire_diag(W, grid):
    if isinstance(W, DispersionLaw):
        return _branchwise_energy(W, grid.p, grid.branch)
    if isinstance(W, dict):
        diag = np.empty(grid.size)
        for b in (1, 2, 3):
            mask = grid.branch == b
            diag[mask] = np.asarray(W[b](grid.p[mask]), dtype=float)
        jp, jm = grid.junction_plus, grid.junction_minus
        pp, pm = grid.domain.p_plus, grid.domain.p_minus
        scale = max(np.max(np.abs(diag)), 1.0)
        if abs(W[1](pp) - W[2](pp)) > 1e-10 * scale or \
           abs(W[2](pm) - W[3](pm)) > 1e-10 * scale:
            raise ValueError("branch potentials disagree at a junction")
        diag[jp] = W[2](pp)
        diag[jm] = W[2](pm)
        return diag
    diag = np.asarray(W, dtype=float)
    if diag.shape != (grid.size,):
        raise ValueError("W array must have one value per grid node")
    return diag


def build_convolution_potential(V, grid, mode="hermitian", domain=None):
    """Kernel realization of a decaying potential on the unfolded grid.

    hermitian mode: plain convolution by K1(xi - xi') with the 1/(2 pi)
    measure, Toeplitz on a LineGrid (Dirichlet truncation) or circulant
    on a PeriodicGrid.  naive mode: the three-interval windowed kernel
    sum with the reversed middle interval conjugated (K2 = conj(K1));
    for asymmetric V this is not Hermitian and is kept for testing.  The
    naive windows split at the junction coordinates of `domain`.
    """
    if not has_kernel(V):
        raise ValueError("potential has no integrable transform (a polynomial's "
                         "kernel is a string of delta-function derivatives); "
                         "use the stencil assembly instead")
    if mode not in ("hermitian", "naive"):
        raise ValueError(f"unknown kernel mode {mode!r}")

    if isinstance(grid, LineGrid):
        offsets = grid.h * np.arange(-(grid.size - 1), grid.size)
        samples = V.kernel(offsets)
        spec = KernelSpec(offsets, samples, mode)
        pos = samples[grid.size - 1:]
        neg = samples[grid.size - 1::-1]
        K1 = toeplitz(pos, neg)
        scale = grid.h / (2.0 * np.pi)
        if mode == "hermitian":
            M = scale * K1
            return OperatorMatrix(M, "convolution-hermitian", grid, kernel=spec)
        dom = domain.domain() if isinstance(domain, DispersionLaw) else domain
        if not isinstance(dom, BranchedDomain):
            raise ValueError("naive mode needs the branched domain for its windows")
        w1, w2, w3 = _heaviside_windows(grid.x, dom.p_minus, dom.p_plus)
        M = scale * (K1 * w1 + np.conj(K1) * w2 + K1 * w3)
        return OperatorMatrix(M, "convolution-naive", grid, kernel=spec)

    if isinstance(grid, PeriodicGrid):
        if mode != "hermitian":
            raise ValueError("windowed kernels need the truncated line, not a ring")
        n = grid.size
        wrap = np.arange(n)
        wrap[wrap > n // 2] -= n
        samples = np.asarray(V.kernel(grid.h * wrap), dtype=complex)
        if n % 2 == 0:
            # The half-period offset is shared between +n/2 and -n/2;
            # its Hermitian part is the consistent sample.
            samples[n // 2] = samples[n // 2].real
        spec = KernelSpec(grid.h * wrap, samples, mode)
        M = (grid.h / (2.0 * np.pi)) * circulant(samples)
        return OperatorMatrix(M, "convolution-hermitian", grid, kernel=spec)

    raise TypeError("build_convolution_potential needs a LineGrid or PeriodicGrid")


def _heaviside_windows(xi, p_minus, p_plus):
    w1 = (xi < p_minus).astype(float)
    w2 = ((xi > p_minus) & (xi < p_plus)).astype(float)
    w3 = (xi > p_plus).astype(float)
    on = xi == p_minus
    w1[on] = 0.5
    w2[on] += 0.5
    on = xi == p_plus
    w3[on] = 0.5
    w2[on] += 0.5
    return w1, w2, w3


def build_convolution_hamiltonian(law, V, grid, mode="hermitian"):
    """Kinetic diagonal plus the kernel potential on the unfolded grid."""
    pot = build_convolution_potential(V, grid, mode=mode,
                                      domain=law.domain() if law.branched else None)
    H = pot.matrix.copy()
    H[np.diag_indices_from(H)] += _unfolded_energy(law, grid.x)
    return OperatorMatrix(H, pot.provenance, grid, kernel=pot.kernel)


def fourier_conjugate_hamiltonian(law, V, grid):
    """Discrete-Fourier conjugate picture on a ring: V multiplies, the
    kinetic energy becomes a pseudodifferential (dense) block.

    Returns the operator whose spectrum matches the ring convolution
    Hamiltonian: diag(V(-x_k)) + F E F* with F[k, m] = e^{-i x_k xi_m}/sqrt(N)
    and x_k the discrete frequencies of the xi grid.
    """
    if not isinstance(grid, PeriodicGrid):
        raise TypeError("the Fourier conjugate picture needs a PeriodicGrid")
    n = grid.size
    xk = 2.0 * np.pi * np.fft.fftfreq(n, d=grid.h)
    F = np.exp(-1j * np.outer(xk, grid.x)) / np.sqrt(n)
    E = _unfolded_energy(law, grid.x)
    H = (F * E) @ F.conj().T
    H[np.diag_indices_from(H)] += V(-xk)
    return OperatorMatrix(H, "fourier-conjugate", grid)


def hermiticity_defect(op):
    """Largest entrywise deviation |H - H*|; compare to 1e-12 max|H|."""
    H = as_matrix(op)
    return float(np.max(np.abs(H - H.conj().T)))
