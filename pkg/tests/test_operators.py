"""Stencil and kernel assemblies of the branched Hamiltonians.

The load-bearing identities: discrete sine vectors are exact eigenvectors
of the even-order Dirichlet stencils, the folded assembly reproduces the
plain unfolded assembly matrix entry by entry, and the convolution matrix
acts on plane waves as multiplication by the potential in the conjugate
variable.
"""

import numpy as np
import pytest

from branchedq import (DispersionLaw, FoldedGrid, GaussianPotential, LineGrid,
                       PeriodicGrid, QuadraticPotential, QuarticPotential,
                       StencilSymbol, build_convolution_hamiltonian,
                       build_convolution_potential, build_dual_wire_hamiltonian,
                       build_folded_hamiltonian, build_unfolded_hamiltonian,
                       fourier_conjugate_hamiltonian, hermiticity_defect)

LAW = DispersionLaw(kappa=3.0)


def test_plane_wave_energy_frozen():
    sym = StencilSymbol(1.0, 0.5, 2.0, -0.3)
    # 16 + 0.5*8 + 2*4 - 0.3*2 at k = 2
    assert sym.plane_wave_energy(2.0) == pytest.approx(27.4)
    assert sym.plane_wave_energy(0.0) == 0.0


def test_flip_reverses_the_wavenumber():
    sym = StencilSymbol(0.7, -0.4, 1.2, 0.9)
    k = np.linspace(-3, 3, 11)
    assert np.allclose(sym.flipped().plane_wave_energy(k),
                       sym.plane_wave_energy(-k), atol=1e-14)
    assert sym.flipped().flipped() == sym
    assert sym.scaled(2.0).plane_wave_energy(k) == pytest.approx(
        list(2.0 * sym.plane_wave_energy(k)))


def test_potential_symbols():
    assert StencilSymbol.from_quadratic_potential(3.0) == StencilSymbol(0, 0, 1.5, 0)
    assert StencilSymbol.from_quartic_potential(0.4, 1.1, -0.7) == \
        StencilSymbol(1.0, -0.4, 1.1, 0.7)


def test_interior_stencil_rows():
    """Hand-built interior row of the generic symbol, second order."""
    g = LineGrid(0.0, 2.1, 20)
    h = g.h
    sym = StencilSymbol(1.0, 0.5, 2.0, -0.3)
    H = build_dual_wire_hamiltonian(sym, None, g).matrix
    j = 10
    expect = {
        -2: 1.0 / h**4 + 1j * 0.5 * (-0.5) / h**3,
        -1: -4.0 / h**4 - 2.0 / h**2 + 1j * 0.5 * 1.0 / h**3
            - 1j * (-0.3) * (-0.5) / h,
        0: 6.0 / h**4 + 2.0 * 2.0 / h**2,
        1: -4.0 / h**4 - 2.0 / h**2 + 1j * 0.5 * (-1.0) / h**3
           - 1j * (-0.3) * 0.5 / h,
        2: 1.0 / h**4 + 1j * 0.5 * 0.5 / h**3,
    }
    for off, val in expect.items():
        assert H[j, j + off] == pytest.approx(val, rel=1e-13)


@pytest.mark.parametrize("accuracy", [2, 4])
def test_sine_vectors_are_exact_discrete_eigenvectors(accuracy):
    """The Dirichlet closure keeps sin(k x) exact for the even stencils."""
    n = 40
    g = LineGrid(0.0, np.pi, n)
    h = g.h
    sym = StencilSymbol(0.0, 0.0, 1.0, 0.0)  # -d^2
    H = build_dual_wire_hamiltonian(sym, None, g, accuracy=accuracy).matrix
    for m in (1, 3, 7):
        k = m  # modes of the unit-pi box
        v = np.sin(k * g.x)
        th = k * h
        if accuracy == 2:
            lam = (2.0 - 2.0 * np.cos(th)) / h**2
        else:
            lam = (30.0 - 32.0 * np.cos(th) + 2.0 * np.cos(2.0 * th)) / (12.0 * h**2)
        assert np.max(np.abs(H @ v - lam * v)) < 1e-11 * lam


def test_biharmonic_sine_eigenvalue():
    n = 60
    g = LineGrid(0.0, np.pi, n)
    h = g.h
    H = build_dual_wire_hamiltonian(StencilSymbol(1.0, 0, 0, 0), None, g).matrix
    k = 2.0
    v = np.sin(k * g.x)
    lam = (4.0 * np.sin(0.5 * k * h) ** 2 / h**2) ** 2
    assert np.max(np.abs(H @ v - lam * v)) < 1e-10 * lam


def test_kinetic_diagonal_on_folded_grid():
    g = FoldedGrid(LAW, 4, 5)
    H = build_folded_hamiltonian(LAW, g).matrix
    assert np.allclose(H, np.diag(np.diag(H)))
    diag = np.real(np.diag(H))
    assert diag[0] == pytest.approx(6.0)          # p=-2 on branch 1, v=-2
    assert diag[4] == pytest.approx(-0.75)        # junction, v=-1
    assert diag[6] == pytest.approx(0.0)          # p=0 on branch 2, v=0
    assert diag[8] == pytest.approx(-0.75)        # junction, v=+1
    assert diag[12] == pytest.approx(6.0)         # p=2 on branch 3, v=2


@pytest.mark.parametrize("V", [QuadraticPotential(1.3),
                               QuarticPotential(0.4, 1.1, -0.7)])
def test_folded_assembly_equals_unfolded(V):
    """Ghost matching plus junction averaging reproduces the plain line."""
    g = FoldedGrid(LAW, 16, 12)
    A = build_folded_hamiltonian(LAW, g, V).matrix
    B = build_unfolded_hamiltonian(LAW, g, V).matrix
    scale = np.max(np.abs(B))
    assert np.max(np.abs(A - B)) < 1e-13 * scale


@pytest.mark.parametrize("V", [QuadraticPotential(1.3),
                               QuarticPotential(0.4, 1.1, -0.7)])
def test_folded_assembly_is_hermitian(V):
    g = FoldedGrid(LAW, 16, 12)
    op = build_folded_hamiltonian(LAW, g, V)
    assert hermiticity_defect(op) < 1e-12 * np.max(np.abs(op.matrix))


def test_unflipped_reversed_branch_breaks_hermiticity():
    """Without the odd-coefficient flip on the reversed branch the ghost
    rule mismatches the first and third derivatives."""
    g = FoldedGrid(LAW, 16, 12)
    V = QuarticPotential(0.4, 1.1, -0.7)
    op = build_folded_hamiltonian(LAW, g, V, flip_reversed_branch=False)
    assert hermiticity_defect(op) > 1e-3


def test_dual_wire_matches_folded_for_polynomial_wells():
    """Kinetic stencil + multivalued W is the same matrix as the folded
    picture with the roles of p and x exchanged."""
    g = FoldedGrid(LAW, 12, 10)
    sym = StencilSymbol.from_quadratic_potential(1.3)
    A = build_dual_wire_hamiltonian(sym, LAW, g).matrix
    B = build_folded_hamiltonian(LAW, g, QuadraticPotential(1.3)).matrix
    assert np.array_equal(A, B)


def test_dual_wire_branch_dict_junction_check():
    g = FoldedGrid(LAW, 8, 6)
    ok = {1: lambda p: np.asarray(p) * 0.0 + 1.0,
          2: lambda p: np.asarray(p) * 0.0 + 1.0,
          3: lambda p: np.asarray(p) * 0.0 + 1.0}
    op = build_dual_wire_hamiltonian(StencilSymbol(0, 0, 1.0, 0), ok, g)
    assert hermiticity_defect(op) < 1e-14
    bad = dict(ok)
    bad[3] = lambda p: np.asarray(p) * 0.0 + 2.0
    with pytest.raises(ValueError):
        build_dual_wire_hamiltonian(StencilSymbol(0, 0, 1.0, 0), bad, g)


def test_dual_wire_array_shape_check():
    g = LineGrid(-1.0, 1.0, 9)
    with pytest.raises(ValueError):
        build_dual_wire_hamiltonian(StencilSymbol(0, 0, 1, 0), np.zeros(5), g)


def test_accuracy_four_limited_to_low_orders():
    g = LineGrid(-1.0, 1.0, 9)
    with pytest.raises(ValueError):
        build_dual_wire_hamiltonian(StencilSymbol(1.0, 0, 0, 0), None, g,
                                    accuracy=4)
    with pytest.raises(ValueError):
        build_dual_wire_hamiltonian(StencilSymbol(0, 0, 1.0, 0), None, g,
                                    accuracy=3)


def test_stencil_assembly_rejects_decaying_wells():
    g = FoldedGrid(LAW, 8, 6)
    with pytest.raises(TypeError):
        build_folded_hamiltonian(LAW, g, GaussianPotential())


def test_convolution_matrix_is_a_kernel_table():
    V = GaussianPotential(2.0, 1.0, 1.5)
    g = LineGrid(-8.0, 8.0, 60)
    M = build_convolution_potential(V, g).matrix
    scale = g.h / (2.0 * np.pi)
    rng = np.random.default_rng(3)
    for _ in range(20):
        i, j = rng.integers(0, g.size, size=2)
        assert M[i, j] == pytest.approx(
            scale * V.kernel((i - j) * g.h), rel=1e-13)


def test_convolution_acts_as_multiplication_in_conjugate_variable():
    """On interior nodes the kernel matrix multiplies a plane wave
    e^{i k xi} by V(-k); truncation only pollutes the edges."""
    V = GaussianPotential(1.0, 1.0, 0.4)
    g = LineGrid(-20.0, 20.0, 800)
    M = build_convolution_potential(V, g).matrix
    for k in (0.0, 0.9, -1.7):
        wave = np.exp(1j * k * g.x)
        out = M @ wave
        mid = slice(g.size // 4, 3 * g.size // 4)
        assert np.max(np.abs(out[mid] - V(-k) * wave[mid])) < 1e-8


def test_convolution_rejects_polynomials_and_bad_modes():
    g = LineGrid(-2.0, 2.0, 9)
    with pytest.raises(ValueError):
        build_convolution_potential(QuadraticPotential(), g)
    with pytest.raises(ValueError):
        build_convolution_potential(GaussianPotential(), g, mode="windowed")
    ring = PeriodicGrid(-2.0, 2.0, 8)
    with pytest.raises(ValueError):
        build_convolution_potential(GaussianPotential(), ring, mode="naive",
                                    domain=LAW)


def test_naive_mode_symmetric_well_collapses_to_hermitian():
    V = GaussianPotential(1.0, 1.0, 0.0)
    g = LineGrid(-20.0, 20.0, 400)
    A = build_convolution_potential(V, g, mode="hermitian").matrix
    B = build_convolution_potential(V, g, mode="naive", domain=LAW).matrix
    assert np.max(np.abs(A - B)) <= 1e-15 * np.max(np.abs(A))


def test_naive_mode_asymmetric_well_is_not_hermitian():
    V = GaussianPotential(2.0, 1.0, 1.5)
    g = LineGrid(-20.0, 20.0, 400)
    op = build_convolution_potential(V, g, mode="naive", domain=LAW)
    assert hermiticity_defect(op) > 1e-3
    assert hermiticity_defect(
        build_convolution_potential(V, g, mode="hermitian")) < 1e-14


def test_ring_convolution_matches_fourier_conjugate_spectrum():
    V = GaussianPotential(1.0, 1.0, 0.0)
    g = PeriodicGrid(-16.0, 16.0, 128)
    A = build_convolution_hamiltonian(LAW, V, g).matrix
    B = fourier_conjugate_hamiltonian(LAW, V, g).matrix
    ea = np.linalg.eigvalsh(A)
    eb = np.linalg.eigvalsh(B)
    assert np.max(np.abs(ea - eb)) < 1e-10


def test_hermiticity_defect_on_raw_arrays():
    assert hermiticity_defect(np.array([[0.0, 1j], [-1j, 0.0]])) == 0.0
    assert hermiticity_defect(np.array([[0.0, 1j], [1j, 0.0]])) == pytest.approx(2.0)
