"""Port-labeled regular graphs and the glued-trees family.

A port-labeled graph stores, for every edge end ``(v, c)``, the opposite end
``(w, c')``. Ends are flattened with ``index(v, c) = v * k + c`` so the whole
labeling is one integer array that doubles as the shift permutation.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

__all__ = [
    "GluedTreesSpec",
    "GraphFormatError",
    "PortLabeledGraph",
    "build_glued_trees",
    "export_edge_list",
    "import_edge_list",
    "validate",
]


class GraphFormatError(ValueError):
    """Malformed edge-list text."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True, eq=False)
class PortLabeledGraph:
    """A k-regular graph with a label on each end of each edge.

    ``ports[v * degree + c]`` is the flat index of the end paired with port
    ``c`` of vertex ``v``. A self loop maps an end to itself. Construction
    does not check consistency; call :func:`validate` for that.
    """

    num_vertices: int
    degree: int
    ports: np.ndarray = field(repr=False)

    def __post_init__(self):
        ports = np.array(self.ports, dtype=np.int64).reshape(-1)
        if ports.size != self.num_vertices * self.degree:
            raise ValueError(
                f"expected {self.num_vertices * self.degree} port entries, got {ports.size}"
            )
        ports.setflags(write=False)
        object.__setattr__(self, "ports", ports)

    @property
    def dimension(self) -> int:
        """Size of the position-coin basis."""
        return self.num_vertices * self.degree

    def port(self, v: int, c: int) -> tuple[int, int]:
        w, d = divmod(int(self.ports[v * self.degree + c]), self.degree)
        return w, d

    def neighbors(self, v: int) -> list[int]:
        return [self.port(v, c)[0] for c in range(self.degree)]

    def __eq__(self, other):
        if not isinstance(other, PortLabeledGraph):
            return NotImplemented
        return (
            self.num_vertices == other.num_vertices
            and self.degree == other.degree
            and np.array_equal(self.ports, other.ports)
        )

    __hash__ = None


@dataclass(frozen=True)
class GluedTreesSpec:
    """Two depth-``depth`` binary trees whose leaves are joined by a cycle.

    ``gluing="alternating"`` links leaves in the fixed order
    L0-R0-L1-R1-...-L0; ``gluing="random"`` shuffles both leaf lists with
    ``seed`` before building the same alternating cycle.
    """

    depth: int
    gluing: Literal["alternating", "random"] = "alternating"
    seed: int | None = None

    def __post_init__(self):
        if int(self.depth) != self.depth or self.depth < 1:
            raise ValueError(f"glued trees need depth >= 1, got {self.depth}")
        if self.gluing not in ("alternating", "random"):
            raise ValueError(f"unknown gluing {self.gluing!r}")

    @property
    def num_vertices(self) -> int:
        return 2 ** (self.depth + 2) - 2

    @property
    def num_leaves(self) -> int:
        """Leaves per tree."""
        return 2**self.depth

    @property
    def start(self) -> int:
        return 0

    @property
    def target(self) -> int:
        return self.num_vertices - 1


def build_glued_trees(spec: GluedTreesSpec | int) -> PortLabeledGraph:
    """Build the 3-regular glued-trees graph with a self loop on each root.

    Left tree vertices are numbered breadth first from the left root (0).
    The right tree mirrors that numbering from the top, so right vertex
    ``i`` of the tree becomes ``num_vertices - 1 - i`` and the right root is
    the highest index. Port 0 is the parent edge (the self loop on a root),
    ports 1 and 2 are the children, or the two cycle edges on a leaf.
    """
    if not isinstance(spec, GluedTreesSpec):
        spec = GluedTreesSpec(spec)
    n = spec.depth
    tree_size = 2 ** (n + 1) - 1
    V = spec.num_vertices
    m = spec.num_leaves
    ports = np.full(3 * V, -1, dtype=np.int64)

    def link(v, c, w, d):
        ports[3 * v + c] = 3 * w + d
        ports[3 * w + d] = 3 * v + c

    def mirror(i):
        return V - 1 - i

    link(0, 0, 0, 0)
    link(V - 1, 0, V - 1, 0)
    for i in range(tree_size - m):
        for child, c in ((2 * i + 1, 1), (2 * i + 2, 2)):
            link(i, c, child, 0)
            link(mirror(i), c, mirror(child), 0)

    left = np.arange(tree_size - m, tree_size)
    right = mirror(left)
    if spec.gluing == "random":
        rng = np.random.default_rng(spec.seed)
        left = rng.permutation(left)
        right = rng.permutation(right)
    for j in range(m):
        link(int(left[j]), 1, int(right[j]), 2)
        link(int(right[j]), 1, int(left[(j + 1) % m]), 2)

    return PortLabeledGraph(V, 3, ports)


def validate(graph: PortLabeledGraph) -> list[str]:
    """Return a list of human-readable violations; empty means valid.

    Checks that every port points at an existing end, that the pairing is an
    involution, and that the graph is connected.
    """
    violations = []
    k = graph.degree
    ports = graph.ports
    size = graph.dimension
    in_range = (ports >= 0) & (ports < size)
    for i in np.flatnonzero(~in_range):
        v, c = divmod(int(i), k)
        violations.append(f"port ({v},{c}) points outside the graph: {int(ports[i])}")
    for i in np.flatnonzero(in_range):
        j = int(ports[i])
        if ports[j] != i:
            v, c = divmod(int(i), k)
            w, d = divmod(j, k)
            back = divmod(int(ports[j]), k) if 0 <= ports[j] < size else int(ports[j])
            violations.append(
                f"involution broken: ({v},{c}) -> ({w},{d}) but ({w},{d}) -> {back}"
            )

    if graph.num_vertices:
        seen = np.zeros(graph.num_vertices, dtype=bool)
        seen[0] = True
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for c in range(k):
                j = int(ports[v * k + c])
                if not 0 <= j < size:
                    continue
                w = j // k
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
        unreached = np.flatnonzero(~seen)
        if unreached.size:
            violations.append(
                f"graph is disconnected: {unreached.size} vertices unreachable from 0"
            )
    return violations


def export_edge_list(graph: PortLabeledGraph) -> str:
    """Serialize as ``v,port_v,w,port_w`` lines, one per edge.

    Each edge is written once from its lower end ``(v, port_v)``; lines come
    out sorted by that end. Self loops appear as ``v,c,v,c``.
    """
    k = graph.degree
    lines = []
    for i, j in enumerate(graph.ports):
        j = int(j)
        if i <= j:
            v, c = divmod(i, k)
            w, d = divmod(j, k)
            lines.append(f"{v},{c},{w},{d}")
    return "\n".join(lines) + "\n"


def import_edge_list(text: str) -> PortLabeledGraph:
    """Parse the format written by :func:`export_edge_list`.

    The vertex count and degree are inferred from the largest indices seen.
    Blank lines are skipped. Raises :class:`GraphFormatError` naming the
    offending line.
    """
    ends = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        fields = line.split(",")
        if len(fields) != 4:
            raise GraphFormatError(lineno, f"expected 4 comma-separated fields, got {len(fields)}")
        try:
            v, c, w, d = (int(f) for f in fields)
        except ValueError:
            raise GraphFormatError(lineno, f"non-integer field in {line!r}") from None
        if min(v, c, w, d) < 0:
            raise GraphFormatError(lineno, "negative index")
        ends.append((lineno, v, c, w, d))
    if not ends:
        raise GraphFormatError(1, "empty edge list")

    V = 1 + max(max(e[1], e[3]) for e in ends)
    k = 1 + max(max(e[2], e[4]) for e in ends)
    ports = np.full(V * k, -1, dtype=np.int64)
    for lineno, v, c, w, d in ends:
        a, b = v * k + c, w * k + d
        for x in {a, b}:
            if ports[x] != -1:
                raise GraphFormatError(lineno, f"port ({x // k},{x % k}) assigned twice")
        ports[a] = b
        ports[b] = a
    missing = np.flatnonzero(ports < 0)
    if missing.size:
        v, c = divmod(int(missing[0]), k)
        raise GraphFormatError(len(text.splitlines()), f"port ({v},{c}) never assigned")
    return PortLabeledGraph(V, k, ports)
