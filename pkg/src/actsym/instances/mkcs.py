"""Max-k-colorable subgraph instances and the DIMACS ``.col`` format."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from ..model import (BINARY, MAXIMIZE, PACKING, LinearConstraint, MixedBinaryProgram,
                     VariableDecl, VarMatrix)

log = logging.getLogger(__name__)


class DimacsError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]
    name: str = ""
    comments: tuple[str, ...] = ()
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj


def parse_dimacs(text: str, name: str = "") -> Graph:
    """Parse DIMACS ``.col`` text into a simple graph (0-based vertices).

    Self-loops and repeated edges are dropped and reported in ``warnings``.
    """
    n = None
    declared_edges = None
    edges: set[tuple[int, int]] = set()
    comments: list[str] = []
    warnings: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        tag = line[0]
        if tag == "c":
            # keep inner indentation so headers round-trip exactly
            comments.append(raw.rstrip()[2:] if raw.startswith("c ") else line[1:].strip())
            continue
        parts = line.split()
        if tag == "p":
            if n is not None:
                raise DimacsError("second problem line", lineno)
            if len(parts) != 4 or parts[1] not in ("edge", "edges", "col"):
                raise DimacsError(f"malformed problem line {line!r}", lineno)
            try:
                n, declared_edges = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"malformed problem line {line!r}", lineno) from None
            if n < 0 or declared_edges < 0:
                raise DimacsError("negative counts in problem line", lineno)
            continue
        if tag == "e":
            if n is None:
                raise DimacsError("edge before problem line", lineno)
            if len(parts) != 3:
                raise DimacsError(f"malformed edge line {line!r}", lineno)
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise DimacsError(f"malformed edge line {line!r}", lineno) from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise DimacsError(f"vertex index out of range in {line!r}", lineno)
            if u == v:
                warnings.append(f"line {lineno}: dropped self-loop on vertex {u}")
                continue
            key = (min(u, v) - 1, max(u, v) - 1)
            if key in edges:
                warnings.append(f"line {lineno}: dropped duplicate edge {u}-{v}")
                continue
            edges.add(key)
            continue
        # Color02 files occasionally carry node weight lines; they do not affect MKCS
        if tag == "n":
            continue
        raise DimacsError(f"unrecognized line {line!r}", lineno)
    if n is None:
        raise DimacsError("missing problem line 'p edge <n> <m>'")
    for w in warnings:
        log.warning("%s: %s", name or "dimacs", w)
    return Graph(n, tuple(sorted(edges)), name, tuple(comments), tuple(warnings))


def write_dimacs(graph: Graph) -> str:
    lines = [f"c {c}" if c else "c" for c in graph.comments]
    lines.append(f"p edge {graph.n} {len(graph.edges)}")
    lines += [f"e {u + 1} {v + 1}" for u, v in graph.edges]
    return "\n".join(lines) + "\n"


def x_var(i: int, r: int) -> str:
    return f"x[{i + 1},{r + 1}]"


@dataclass(frozen=True)
class MkcsData:
    graph: Graph
    k: int
    name: str = ""

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")

    @property
    def matrix(self) -> VarMatrix:
        return VarMatrix([[x_var(i, r) for r in range(self.k)] for i in range(self.graph.n)],
                         PACKING, "colors", symmetric=self.k >= 2, role="colors")


def build_mkcs(graph: Graph, k: int, name: str | None = None) -> MixedBinaryProgram:
    """Standard vertex/color assignment formulation; colors outer in variable order."""
    data = MkcsData(graph, k, name if name is not None else graph.name)
    n = graph.n
    variables = [VariableDecl(x_var(i, r), BINARY, 0, 1, 1) for r in range(k) for i in range(n)]
    cons = []
    for u, v in graph.edges:
        for r in range(k):
            cons.append(LinearConstraint(((x_var(u, r), 1), (x_var(v, r), 1)), None, 1,
                                         f"edge[{u + 1},{v + 1},{r + 1}]"))
    for i in range(n):
        cons.append(LinearConstraint(tuple((x_var(i, r), 1) for r in range(k)), None, 1,
                                     f"vertex[{i + 1}]"))
    label = data.name or f"mkcs_n{n}_k{k}"
    return MixedBinaryProgram(variables, cons, MAXIMIZE, [data.matrix], label)


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    edges = sorted((min(u, v), max(u, v)) for u, v in outer + spokes + inner)
    return Graph(10, tuple(edges), "petersen")


def path(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)), f"path{n}")


def mycielski(k: int) -> Graph:
    """Color02's ``myciel<k>``: ``k - 1`` Mycielski steps from a single edge (myciel3 has 11 vertices)."""
    if k < 1:
        raise ValueError("k must be positive")
    n, edges = 2, {(0, 1)}
    for _ in range(k - 1):
        new = set(edges)
        for u, v in edges:
            new.add((u, n + v) if u < n + v else (n + v, u))
            new.add((v, n + u) if v < n + u else (n + u, v))
        for i in range(n):
            new.add((n + i, 2 * n))
        edges = new
        n = 2 * n + 1
    return Graph(n, tuple(sorted(edges)), f"myciel{k}")
