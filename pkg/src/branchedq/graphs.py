"""Quantum mechanics on metric graphs: wires carrying -a d^2/dx^2 - i b d/dx
joined at vertices by value and flux matching.

At a weighted vertex the incident edge values lock to kappa_mu times one
shared vertex amplitude, and the weighted flux sum
sum_mu alpha_mu conj(kappa_mu) psi_mu' (inward) vanishes.  Kirchhoff is
kappa = 1 with drift-free edges.  The discretization assembles piecewise
linear elements with a lumped mass matrix: the constrained basis bakes the
value matching in exactly, the symmetrized drift form keeps the matrix
Hermitian unconditionally, and consistency of that Hermitian matrix with
the intended differential operator is precisely the balance constraint
sum_mu beta_mu |kappa_mu|^2 = 0, which is validated and enforced here.

Condition counting follows the wire picture directly: a degree-d vertex
supplies d conditions (d-1 matchings plus one flux), each semi-infinite
end supplies one decay condition, and each line owns two disposable
constants, so conditions and constants balance on Kirchhoff networks.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import FluxBalanceError
from .operators import OperatorMatrix


@dataclass(frozen=True)
class Edge:
    """Finite edge between two vertices; kinetic form alpha p^2 + beta p."""

    u: object
    v: object
    length: float
    alpha: float = 1.0
    beta: float = 0.0


@dataclass(frozen=True)
class HalfLine:
    """Semi-infinite edge anchored at one vertex."""

    vertex: object
    alpha: float = 1.0
    beta: float = 0.0


@dataclass(frozen=True)
class VertexCondition:
    """kirchhoff | weighted (kappa per incident line, incidence order) |
    dirichlet."""

    kind: str = "kirchhoff"
    kappa: tuple = None

    def __post_init__(self):
        if self.kind not in ("kirchhoff", "weighted", "dirichlet"):
            raise ValueError(f"unknown vertex condition {self.kind!r}")
        if self.kind == "weighted":
            if self.kappa is None or len(self.kappa) == 0:
                raise ValueError("weighted condition needs kappa coefficients")
            object.__setattr__(self, "kappa", tuple(complex(k) for k in self.kappa))
        elif self.kappa is not None:
            raise ValueError(f"{self.kind} condition takes no kappa list")


class MetricGraph:
    """Vertices, finite edges, half-lines, and loose free lines.

    conditions maps vertex id to a VertexCondition; unmapped vertices are
    Kirchhoff.  Incidence order at a vertex (the order kappa lists follow)
    is finite edges in list order, each endpoint separately, then
    half-lines in list order.  free_lines counts lines with two infinite
    ends and no vertex; they only participate in condition counting.
    """

    def __init__(self, vertices, edges=(), half_lines=(), free_lines=0,
                 conditions=None):
        self.vertices = list(vertices)
        vset = set(self.vertices)
        if len(vset) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        self.edges = [e if isinstance(e, Edge) else Edge(*e) for e in edges]
        self.half_lines = [h if isinstance(h, HalfLine) else HalfLine(*h)
                           for h in half_lines]
        self.free_lines = int(free_lines)
        for e in self.edges:
            if e.u not in vset or e.v not in vset:
                raise ValueError(f"dangling edge {e.u!r}-{e.v!r}: endpoint "
                                 "not a declared vertex")
            if e.u == e.v:
                raise ValueError("self-loops are not supported")
            if not e.length > 0.0:
                raise ValueError("edge lengths must be positive")
        for hl in self.half_lines:
            if hl.vertex not in vset:
                raise ValueError(f"dangling half-line at {hl.vertex!r}")
        self.conditions = {v: VertexCondition() for v in self.vertices}
        if conditions:
            for v, c in conditions.items():
                if v not in vset:
                    raise ValueError(f"condition for unknown vertex {v!r}")
                self.conditions[v] = c
        for v in self.vertices:
            self._check_condition(v)

    def incidence(self, v):
        """Incident (kind, index, end) triples in canonical order."""
        out = []
        for i, e in enumerate(self.edges):
            if e.u == v:
                out.append(("edge", i, 0))
            if e.v == v:
                out.append(("edge", i, 1))
        for j, hl in enumerate(self.half_lines):
            if hl.vertex == v:
                out.append(("half", j, 0))
        return out

    def degree(self, v):
        return len(self.incidence(v))

    def _line(self, kind, index):
        return self.edges[index] if kind == "edge" else self.half_lines[index]

    def vertex_kappa(self, v):
        """kappa per incident line (1.0 for kirchhoff and dirichlet)."""
        cond = self.conditions[v]
        inc = self.incidence(v)
        if cond.kind == "weighted":
            if len(cond.kappa) != len(inc):
                raise ValueError(
                    f"vertex {v!r}: {len(cond.kappa)} kappa values for "
                    f"{len(inc)} incident lines")
            return list(cond.kappa)
        return [1.0] * len(inc)

    def _check_condition(self, v):
        cond = self.conditions[v]
        if cond.kind == "dirichlet":
            return
        inc = self.incidence(v)
        if not inc:
            return
        kappa = self.vertex_kappa(v)
        balance = sum(self._line(k, i).beta * abs(kp) ** 2
                      for (k, i, _), kp in zip(inc, kappa))
        scale = sum(abs(self._line(k, i).beta) * abs(kp) ** 2
                    for (k, i, _), kp in zip(inc, kappa))
        if abs(balance) > 1e-12 * max(scale, 1e-300):
            raise FluxBalanceError(
                f"vertex {v!r} violates the drift balance: "
                f"sum beta |kappa|^2 = {balance:.6g} (must vanish for the "
                "discrete operator to match the vertex conditions)",
                imbalance=balance)

    def __repr__(self):
        return (f"MetricGraph({len(self.vertices)} vertices, "
                f"{len(self.edges)} edges, {len(self.half_lines)} half-lines"
                + (f", {self.free_lines} free lines" if self.free_lines else "")
                + ")")


def count_conditions(graph):
    """(node, infinity, total, disposable constants).

    A degree-d vertex carries d conditions; every semi-infinite end one;
    every line (edge, half-line, or free line) two solution constants.
    """
    node = sum(graph.degree(v) for v in graph.vertices)
    infinity = len(graph.half_lines) + 2 * graph.free_lines
    lines = len(graph.edges) + len(graph.half_lines) + graph.free_lines
    return node, infinity, node + infinity, 2 * lines


# -- discretization -----------------------------------------------------------

@dataclass
class _Chain:
    """One meshed line: local nodes 0..n, global slots, endpoint factors."""

    kind: str
    index: int
    va: object
    vb: object
    n: int
    h: float
    alpha: float
    beta: float
    slots: np.ndarray = field(repr=False)
    factors: np.ndarray = field(repr=False)


class GraphLayout:
    """Mesh bookkeeping for a discretized graph.

    Interior nodes of every line come first, then one slot per
    non-Dirichlet vertex.  Physical edge values are the mass-scaled
    entries of an eigenvector times the endpoint kappa factors;
    edge_values() performs that extraction.
    """

    def __init__(self, graph, resolution, truncation=None):
        if resolution < 5:
            raise ValueError("resolution must be at least 5 intervals per edge")
        if graph.half_lines and truncation is None:
            raise ValueError("graphs with half-lines need a truncation length")
        if graph.free_lines:
            raise ValueError("free lines have no vertices to mesh against")
        self.graph = graph
        self.resolution = int(resolution)
        self.truncation = truncation
        # Norms of mass-scaled vectors are plain sums; no grid spacing.
        self.h = 1.0

        self.vertex_slot = {}
        self._kappa = {}
        for v in graph.vertices:
            self._kappa[v] = dict(zip(
                [(k, i) for k, i, _ in graph.incidence(v)],
                graph.vertex_kappa(v)))

        self.chains = []
        cursor = 0
        lines = [("edge", i, e.u, e.v, e.length, e.alpha, e.beta)
                 for i, e in enumerate(graph.edges)]
        lines += [("half", j, hl.vertex, None, truncation, hl.alpha, hl.beta)
                  for j, hl in enumerate(graph.half_lines)]
        interiors = []
        for kind, idx, va, vb, length, alpha, beta in lines:
            n = self.resolution
            interiors.append((kind, idx, va, vb, n, length / n, alpha, beta,
                              cursor))
            cursor += n - 1
        for v in graph.vertices:
            if graph.conditions[v].kind != "dirichlet" and graph.degree(v) > 0:
                self.vertex_slot[v] = cursor
                cursor += 1
        self.size = cursor

        for kind, idx, va, vb, n, h, alpha, beta, start in interiors:
            slots = np.empty(n + 1, dtype=int)
            factors = np.ones(n + 1, dtype=complex)
            slots[1:n] = start + np.arange(n - 1)
            for local, v in ((0, va), (n, vb)):
                if v is None or self.graph.conditions[v].kind == "dirichlet":
                    slots[local] = -1
                    factors[local] = 0.0
                else:
                    slots[local] = self.vertex_slot[v]
                    factors[local] = self._kappa[v][(kind, idx)]
            self.chains.append(_Chain(kind, idx, va, vb, n, h, alpha, beta,
                                      slots, factors))

        self.mass = np.zeros(self.size)
        for c in self.chains:
            w = np.abs(c.factors) ** 2 * (c.h / 2.0)
            for i in range(c.n):
                for local in (i, i + 1):
                    if c.slots[local] >= 0:
                        self.mass[c.slots[local]] += w[local]

    def chain_values(self, w, chain):
        """Physical wave values along a chain, local coordinate ascending."""
        w = np.asarray(w, dtype=complex)
        scaled = w / np.sqrt(self.mass)
        vals = np.zeros(chain.n + 1, dtype=complex)
        live = chain.slots >= 0
        vals[live] = chain.factors[live] * scaled[chain.slots[live]]
        return vals

    def vertex_value(self, w, v):
        if v not in self.vertex_slot:
            return 0.0 + 0.0j
        w = np.asarray(w, dtype=complex)
        slot = self.vertex_slot[v]
        return w[slot] / np.sqrt(self.mass[slot])


def graph_hamiltonian(graph, resolution, conditions=None, truncation=None):
    """Hermitian graph Hamiltonian by constrained P1 elements, lumped mass.

    resolution is the interval count per line; half-lines are cut to
    `truncation` with Dirichlet caps.  An optional conditions mapping
    overrides the graph's stored vertex conditions.  The drift balance
    sum beta |kappa|^2 = 0 is validated per vertex and violations are
    rejected with the computed imbalance.
    """
    if conditions is not None:
        merged = dict(graph.conditions)
        merged.update(conditions)
        graph = MetricGraph(graph.vertices, graph.edges, graph.half_lines,
                            graph.free_lines, merged)
    layout = GraphLayout(graph, resolution, truncation)
    complex_needed = any(c.beta != 0.0 for c in layout.chains) or any(
        complex(k).imag != 0.0
        for v in graph.vertices for k in layout._kappa[v].values())
    # Drift-free graphs with real weights assemble real symmetric, which
    # halves memory and lets eigh take the fast path.
    dtype = complex if complex_needed else float
    A = np.zeros((layout.size, layout.size), dtype=dtype)
    for c in layout.chains:
        stiff = c.alpha / c.h
        drift = -0.5j * c.beta
        for i in range(c.n):
            pair = (i, i + 1)
            for r in pair:
                sr = c.slots[r]
                if sr < 0:
                    continue
                fr = np.conj(c.factors[r])
                for col in pair:
                    sc = c.slots[col]
                    if sc < 0:
                        continue
                    fc = c.factors[col]
                    k = stiff if r == col else -stiff
                    term = fr * fc * k
                    if c.beta != 0.0 and r != col:
                        term = term + fr * fc * (drift if col > r else -drift)
                    A[sr, sc] += term if dtype is complex else term.real
    root = np.sqrt(layout.mass)
    A /= root[:, None]
    A /= root[None, :]
    return OperatorMatrix(A, "graph", layout)


_FLUX_EDGE = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0


def node_flux(psi, vertex, graph):
    """Weighted inward flux sum_mu alpha_mu conj(kappa_mu) psi_mu' at a vertex.

    `graph` is the discretized layout (or the OperatorMatrix holding it);
    psi is a vector in the Hamiltonian's coordinates.  Derivatives use
    the 5-point one-sided stencil along each incident line, oriented into
    the node.  Near zero on eigenstates of non-Dirichlet vertices.
    """
    layout = graph.grid if isinstance(graph, OperatorMatrix) else graph
    if not isinstance(layout, GraphLayout):
        raise TypeError("node_flux needs the discretized graph layout")
    g = layout.graph
    flux = 0.0 + 0.0j
    for (kind, idx, end) in g.incidence(vertex):
        chain = next(c for c in layout.chains
                     if c.kind == kind and c.index == idx)
        vals = layout.chain_values(psi, chain)
        if chain.n + 1 < 5:
            raise ValueError("chain too short for the flux stencil")
        if end == 1:
            seg = vals[::-1][:5]
        else:
            seg = vals[:5]
        outward = (_FLUX_EDGE @ seg) / chain.h
        kappa = layout._kappa[vertex][(kind, idx)]
        flux += chain.alpha * np.conj(kappa) * (-outward)
    return complex(flux)


# -- analytic oracle and library ----------------------------------------------

def _bisect_roots(fn, k_lo, k_hi, samples):
    ks = np.linspace(k_lo, k_hi, samples)
    vals = fn(ks)
    roots = []
    for a, b, fa, fb in zip(ks[:-1], ks[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            roots.append(a)
            continue
        if fa * fb < 0.0:
            lo, hi, flo = a, b, fa
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                fm = fn(mid)
                if flo * fm <= 0.0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            roots.append(0.5 * (lo + hi))
    return roots


def star_secular_spectrum(edge_count, length, k_max):
    """Wavenumbers of the equilateral Dirichlet-tip Kirchhoff star.

    cos(k l) = 0 gives simple symmetric modes; sin(k l) = 0 (k > 0) gives
    modes of multiplicity edge_count - 1.  Returned sorted with repeats.
    """
    if edge_count < 2:
        raise ValueError("a star needs at least two edges")
    samples = max(64, int(40 * k_max * length / np.pi))
    eps = 1e-9 / max(length, 1.0)
    out = []
    for k in _bisect_roots(lambda k: np.cos(k * length), eps, k_max, samples):
        out.append((k, 1))
    for k in _bisect_roots(lambda k: np.sin(k * length), eps, k_max, samples):
        out.append((k, edge_count - 1))
    out.sort()
    ks = []
    for k, mult in out:
        ks.extend([k] * mult)
    return ks


def star_graph(edge_count, length, alpha=1.0, beta=0.0):
    """Equilateral star: Kirchhoff center, Dirichlet tips."""
    tips = [f"t{i}" for i in range(edge_count)]
    edges = [Edge("c", t, length, alpha, beta) for t in tips]
    conditions = {t: VertexCondition("dirichlet") for t in tips}
    return MetricGraph(["c"] + tips, edges, conditions=conditions)


def compton_graph(edge_length=1.0):
    """Two internal vertices joined by one edge, two half-lines each:
    five lines total."""
    return MetricGraph(
        ["L", "R"],
        [Edge("L", "R", edge_length)],
        [HalfLine("L"), HalfLine("L"), HalfLine("R"), HalfLine("R")])


def box_graph(edge_length=1.0):
    """Four vertices in a cycle, one half-line per vertex: eight lines."""
    ids = [0, 1, 2, 3]
    edges = [Edge(i, (i + 1) % 4, edge_length) for i in ids]
    return MetricGraph(ids, edges, [HalfLine(i) for i in ids])


@dataclass(frozen=True)
class GraphLibraryEntry:
    name: str
    builder: object
    summary: str


GRAPH_LIBRARY = {
    "compton": GraphLibraryEntry(
        "compton", compton_graph,
        "two degree-3 vertices, one internal edge, four half-lines"),
    "box": GraphLibraryEntry(
        "box", box_graph,
        "four degree-3 vertices on a cycle, one half-line each"),
}


# -- file format ---------------------------------------------------------------

GRAPH_SCHEMA = {
    "type": "object",
    "required": ["version", "vertices"],
    "properties": {
        "version": {"const": 1},
        "vertices": {"type": "array", "items": {
            "type": "object",
            "required": ["id"],
            "properties": {
                "id": {"type": ["string", "integer"]},
                "condition": {"type": "object",
                              "required": ["type"],
                              "properties": {
                                  "type": {"enum": ["kirchhoff", "weighted",
                                                    "dirichlet"]},
                                  "kappa": {"type": "array"}}},
            }}},
        "edges": {"type": "array", "items": {
            "type": "object",
            "required": ["u", "v", "length"],
            "properties": {"u": {"type": ["string", "integer"]},
                           "v": {"type": ["string", "integer"]},
                           "length": {"type": "number"},
                           "alpha": {"type": "number"},
                           "beta": {"type": "number"}}}},
        "half_lines": {"type": "array", "items": {
            "type": "object",
            "required": ["vertex"],
            "properties": {"vertex": {"type": ["string", "integer"]},
                           "alpha": {"type": "number"},
                           "beta": {"type": "number"}}}},
        "free_lines": {"type": "integer", "minimum": 0},
    },
}


def _kappa_from_json(values):
    out = []
    for v in values:
        if isinstance(v, (list, tuple)):
            out.append(complex(v[0], v[1]))
        else:
            out.append(complex(v))
    return tuple(out)


def graph_from_mapping(doc):
    """Build a MetricGraph from the versioned mapping format."""
    import jsonschema
    jsonschema.validate(doc, GRAPH_SCHEMA)
    vertices = []
    conditions = {}
    for entry in doc["vertices"]:
        vid = entry["id"]
        vertices.append(vid)
        cond = entry.get("condition")
        if cond:
            kappa = cond.get("kappa")
            conditions[vid] = VertexCondition(
                cond["type"],
                _kappa_from_json(kappa) if kappa is not None else None)
    edges = [Edge(e["u"], e["v"], e["length"], e.get("alpha", 1.0),
                  e.get("beta", 0.0)) for e in doc.get("edges", [])]
    half = [HalfLine(h["vertex"], h.get("alpha", 1.0), h.get("beta", 0.0))
            for h in doc.get("half_lines", [])]
    return MetricGraph(vertices, edges, half, doc.get("free_lines", 0),
                       conditions)


def graph_to_mapping(graph):
    doc = {"version": 1, "vertices": [], "edges": [], "half_lines": [],
           "free_lines": graph.free_lines}
    for v in graph.vertices:
        cond = graph.conditions[v]
        entry = {"id": v, "condition": {"type": cond.kind}}
        if cond.kappa is not None:
            entry["condition"]["kappa"] = [[k.real, k.imag] for k in cond.kappa]
        doc["vertices"].append(entry)
    for e in graph.edges:
        doc["edges"].append({"u": e.u, "v": e.v, "length": e.length,
                             "alpha": e.alpha, "beta": e.beta})
    for h in graph.half_lines:
        doc["half_lines"].append({"vertex": h.vertex, "alpha": h.alpha,
                                  "beta": h.beta})
    return doc


def load_graph(path):
    with open(path) as fh:
        return graph_from_mapping(json.load(fh))


def dump_graph(graph, path):
    with open(path, "w") as fh:
        json.dump(graph_to_mapping(graph), fh, indent=2)
        fh.write("\n")
