"""Instance data, generators, builders and file formats.

On disk, MKP and MUCP instances are JSON documents tagged with a ``format``
field. MKCS instances are either a DIMACS ``.col`` file (``k`` supplied
separately) or a JSON wrapper ``{"format": "mkcs", "k": ..., "dimacs": ...}``
that carries the graph text inline.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..model import MixedBinaryProgram
from . import mkp, mucp
from .mkcs import DimacsError, Graph, MkcsData, build_mkcs, parse_dimacs, write_dimacs
from .mkp import MkpData, build_mkp, gen_mkp
from .mucp import MucpData, UnitType, build_mucp, gen_mucp

MKP, MUCP, MKCS = "mkp", "mucp", "mkcs"
PROBLEM_KINDS = (MKP, MUCP, MKCS)


class InstanceError(ValueError):
    pass


@dataclass(frozen=True)
class Problem:
    """Problem data tagged with its family."""

    kind: str
    data: object

    @property
    def name(self) -> str:
        if self.kind == MKCS:
            return self.data.name or self.data.graph.name
        return self.data.name

    def build(self) -> MixedBinaryProgram:
        if self.kind == MKP:
            return build_mkp(self.data)
        if self.kind == MUCP:
            return build_mucp(self.data)
        if self.kind == MKCS:
            return build_mkcs(self.data.graph, self.data.k, self.name)
        raise InstanceError(f"unknown problem kind {self.kind!r}")

    def to_json(self) -> dict:
        if self.kind == MKP:
            return mkp.to_json(self.data)
        if self.kind == MUCP:
            return mucp.to_json(self.data)
        return {"format": "mkcs", "version": 1, "name": self.name, "k": self.data.k,
                "dimacs": write_dimacs(self.data.graph)}


def problem_from_json(obj: dict) -> Problem:
    fmt = obj.get("format") if isinstance(obj, dict) else None
    try:
        if fmt == "mkp":
            return Problem(MKP, mkp.from_json(obj))
        if fmt == "mucp":
            return Problem(MUCP, mucp.from_json(obj))
        if fmt == "mkcs":
            graph = parse_dimacs(obj["dimacs"], obj.get("name", ""))
            return Problem(MKCS, MkcsData(graph, int(obj["k"]), obj.get("name", "")))
    except (KeyError, TypeError) as exc:
        raise InstanceError(f"malformed {fmt} instance: {exc}") from exc
    raise InstanceError(f"unknown instance format {fmt!r}")


def load(path: str | Path, k: int | None = None) -> Problem:
    """Read an instance file; ``k`` is required for bare DIMACS files."""
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".col":
        if k is None:
            raise InstanceError(f"{path}: a DIMACS graph needs the number of colors k")
        graph = parse_dimacs(text, path.stem)
        return Problem(MKCS, MkcsData(graph, k, f"{path.stem}_k{k}"))
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}: not valid JSON ({exc})") from exc
    problem = problem_from_json(obj)
    if problem.kind == MKCS and k is not None:
        problem = Problem(MKCS, MkcsData(problem.data.graph, k, problem.data.name))
    return problem


def dump(problem: Problem) -> str:
    return json.dumps(problem.to_json(), indent=1, sort_keys=True) + "\n"


def save(problem: Problem, path: str | Path) -> None:
    Path(path).write_text(dump(problem))


__all__ = [
    "MKP", "MUCP", "MKCS", "PROBLEM_KINDS", "Problem", "InstanceError", "problem_from_json",
    "load", "dump", "save", "DimacsError", "Graph", "MkcsData", "MkpData", "MucpData",
    "UnitType", "build_mkcs", "build_mkp", "build_mucp", "gen_mkp", "gen_mucp",
    "parse_dimacs", "write_dimacs",
]
