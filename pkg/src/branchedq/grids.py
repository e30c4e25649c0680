"""Uniform grids for the line, the folded branched domain, and the ring.

The folded grid is the workhorse: it lays the three branches out on the
unfolded line with both junctions exactly on grid nodes, keeps one shared
unknown per junction (value matching is then automatic), and records for
each branch a segment descriptor that the operator assembly walks in the
branch's own coordinate.  Arm lengths and the inner spacing are tied so
that every node of branch 2 lines up with mirror nodes across both
junctions; that alignment is what makes the ghost-point junction rules
exact.
"""

from dataclasses import dataclass, field

import numpy as np

from .dispersion import BranchedDomain, DispersionLaw


@dataclass(frozen=True)
class LineGrid:
    """Interior nodes of [x_min, x_max] with Dirichlet values at both ends.

    n is the number of unknowns; the end points themselves carry value 0
    and are not stored.
    """

    x_min: float
    x_max: float
    n: int
    kind: str = "line"

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        if self.n < 5:
            raise ValueError("need at least 5 interior nodes")

    @property
    def h(self):
        return (self.x_max - self.x_min) / (self.n + 1)

    @property
    def x(self):
        return self.x_min + self.h * np.arange(1, self.n + 1)

    @property
    def size(self):
        return self.n


@dataclass(frozen=True)
class PeriodicGrid:
    """n equispaced nodes on a ring of circumference x_max - x_min."""

    x_min: float
    x_max: float
    n: int
    kind: str = "periodic"

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        if self.n < 4:
            raise ValueError("need at least 4 nodes")

    @property
    def period(self):
        return self.x_max - self.x_min

    @property
    def h(self):
        return self.period / self.n

    @property
    def x(self):
        return self.x_min + self.h * np.arange(self.n)

    @property
    def size(self):
        return self.n


@dataclass
class BranchSegment:
    """One branch of a folded grid, in the branch's own coordinate order.

    gidx maps local node index (folded coordinate ascending) to the global
    unknown index.  flip_odd marks the orientation-reversed branch, whose
    odd-order operator coefficients change sign.  Each end is either
    ("dirichlet",) or ("mirror", partner_branch, partner_end): ghost values
    k steps past a mirror end are the partner's values k steps in from its
    named end, which realizes the alternating-parity junction matching
    exactly for central stencils.  row_weight halves the equation
    contribution at shared junction nodes so the two meeting branches
    average there.
    """

    branch: int
    gidx: np.ndarray
    flip_odd: bool
    left: tuple
    right: tuple
    row_weight: np.ndarray = field(repr=False)


class FoldedGrid:
    """Three-branch folded grid with junctions exactly on grid nodes.

    Parameters
    ----------
    law : DispersionLaw or BranchedDomain
        Supplies the junction momenta q_-, q_+ (law must be branched).
    n_inner : int
        Number of grid intervals between the junctions; the spacing is
        h = (q_+ - q_-)/n_inner.
    n_arm : int
        Nodes on each outer arm counting its junction node; the Dirichlet
        boundary sits one step past the last arm node.
    kind : str
        "folded-p" for the momentum representation (default) or "folded-x"
        for the dual position-space wire.

    Unknown layout (N = 2*n_arm + n_inner - 1 total): branch-1 arm nodes
    come first ending in the p=q_+ junction, then the branch-2 interior in
    unfolded order, then the p=q_- junction, then the branch-3 arm.
    """

    def __init__(self, law, n_inner, n_arm, kind="folded-p"):
        domain = law.domain() if isinstance(law, DispersionLaw) else law
        if not isinstance(domain, BranchedDomain):
            raise TypeError("law must be a DispersionLaw or BranchedDomain")
        if not domain.p_plus > domain.p_minus:
            raise ValueError("folded grids require a branched law (kappa > 0)")
        if n_inner < 2:
            raise ValueError("n_inner must be at least 2")
        if n_arm < 3:
            raise ValueError("n_arm must be at least 3")
        if kind not in ("folded-p", "folded-x"):
            raise ValueError(f"unknown folded grid kind {kind!r}")

        self.domain = domain
        self.n_inner = int(n_inner)
        self.n_arm = int(n_arm)
        self.kind = kind
        self.h = (domain.p_plus - domain.p_minus) / n_inner
        self.size = 2 * self.n_arm + self.n_inner - 1

        # Index of the shared node at folded coordinate q_+ (branches 1|2)
        # and at q_- (branches 2|3).
        self.junction_plus = self.n_arm - 1
        self.junction_minus = self.n_arm + self.n_inner - 1

        u = domain.p_minus + self.h * (np.arange(self.size) - (self.n_arm - 1))
        u[self.junction_plus] = domain.p_minus
        u[self.junction_minus] = domain.p_plus
        self.u = u

        branch = np.where(u < domain.p_minus, 1, np.where(u < domain.p_plus, 2, 3))
        self.branch = branch

        p = np.where(branch == 1, u + domain.p_plus - domain.p_minus,
                     np.where(branch == 2, domain.p_plus + domain.p_minus - u,
                              u - domain.p_plus + domain.p_minus))
        p[self.junction_plus] = domain.p_plus
        p[self.junction_minus] = domain.p_minus
        self.p = p

        window = np.zeros(self.size)
        window[(u > domain.p_minus) & (u < domain.p_plus)] = 1.0
        window[self.junction_plus] = 0.5
        window[self.junction_minus] = 0.5
        self.branch2_window = window

    def segments(self):
        """Per-branch segment descriptors, keyed by branch id."""
        na, ni = self.n_arm, self.n_inner
        w1 = np.ones(na)
        w1[-1] = 0.5
        seg1 = BranchSegment(1, np.arange(na), False,
                             ("dirichlet",), ("mirror", 2, "right"), w1)
        w2 = np.ones(ni + 1)
        w2[0] = 0.5
        w2[-1] = 0.5
        seg2 = BranchSegment(2, np.arange(na - 1 + ni, na - 2, -1), True,
                             ("mirror", 3, "left"), ("mirror", 1, "right"), w2)
        w3 = np.ones(na)
        w3[0] = 0.5
        seg3 = BranchSegment(3, np.arange(na + ni - 1, 2 * na + ni - 1), False,
                             ("mirror", 2, "left"), ("dirichlet",), w3)
        return {1: seg1, 2: seg2, 3: seg3}

    def branch_values(self, values, branch):
        """Restrict a nodal array to one branch, folded coordinate ascending.

        Junction nodes belong to both adjacent branches and appear in each
        restriction.  Returns (folded coordinates, values)."""
        seg = self.segments()[branch]
        return self.p[seg.gidx], np.asarray(values)[seg.gidx]

    def __repr__(self):
        return (f"FoldedGrid(kind={self.kind!r}, n_inner={self.n_inner}, "
                f"n_arm={self.n_arm}, h={self.h:.6g}, size={self.size})")
