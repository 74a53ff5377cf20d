"""Mixed-binary programs and the variable matrices symmetry handling acts on.

Coefficients are stored as :class:`fractions.Fraction` so that feasibility of
a candidate solution can be decided exactly. The LP layer converts to floats.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

BINARY = "binary"
CONTINUOUS = "continuous"

FULL = "full"
PACKING = "packing"
PARTITIONING = "partitioning"
ORBITOPE_KINDS = (FULL, PACKING, PARTITIONING)

MAXIMIZE = "maximize"
MINIMIZE = "minimize"

FORMAT_VERSION = 1


def as_rational(value) -> Fraction | None:
    """Convert ints, floats, strings like ``"3/2"`` to Fraction; None stays None."""
    if value is None:
        return None
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**12)
    return Fraction(value)


@dataclass(frozen=True)
class VariableDecl:
    id: str
    kind: str = BINARY
    lower: Fraction = Fraction(0)
    upper: Fraction = Fraction(1)
    objective: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "lower", as_rational(self.lower))
        object.__setattr__(self, "upper", as_rational(self.upper))
        object.__setattr__(self, "objective", as_rational(self.objective))

    @property
    def is_binary(self) -> bool:
        return self.kind == BINARY


@dataclass(frozen=True)
class LinearConstraint:
    """``lower <= sum(coef * var) <= upper``; a None side is unbounded."""

    terms: tuple[tuple[str, Fraction], ...]
    lower: Fraction | None = None
    upper: Fraction | None = None
    name: str = ""

    def __post_init__(self):
        terms = tuple((str(v), as_rational(c)) for v, c in self.terms)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "lower", as_rational(self.lower))
        object.__setattr__(self, "upper", as_rational(self.upper))

    def activity(self, assignment: Mapping[str, Fraction]) -> Fraction:
        return sum((c * assignment[v] for v, c in self.terms), Fraction(0))

    def is_satisfied(self, assignment: Mapping[str, Fraction]) -> bool:
        act = self.activity(assignment)
        if self.lower is not None and act < self.lower:
            return False
        if self.upper is not None and act > self.upper:
            return False
        return True


@dataclass(frozen=True)
class VarMatrix:
    """An ``rows x cols`` grid of binary variable ids.

    ``symmetric`` marks matrices whose columns are interchangeable in every
    feasible solution (a global symmetry); matrices that only carry structure
    for an activation handler leave it False. ``role`` is a free-form tag the
    setting configuration uses to pick matrices (e.g. ``"knapsacks"``).
    """

    entries: tuple[tuple[str, ...], ...]
    kind: str = FULL
    label: str = ""
    symmetric: bool = False
    role: str = ""

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(tuple(row) for row in self.entries))

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def column(self, c: int) -> tuple[str, ...]:
        return tuple(row[c] for row in self.entries)

    def variables(self) -> list[str]:
        return [v for row in self.entries for v in row]

    def submatrix(self, row_set: Sequence[int] | None = None,
                  col_list: Sequence[int] | None = None) -> "Submatrix":
        rows = tuple(range(self.rows)) if row_set is None else tuple(row_set)
        cols = tuple(range(self.cols)) if col_list is None else tuple(col_list)
        return Submatrix(self, rows, cols)


@dataclass(frozen=True)
class Submatrix:
    matrix: VarMatrix
    row_set: tuple[int, ...]
    col_list: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "row_set", tuple(int(r) for r in self.row_set))
        object.__setattr__(self, "col_list", tuple(int(c) for c in self.col_list))
        for name, idx, bound in (("row", self.row_set, self.matrix.rows),
                                 ("column", self.col_list, self.matrix.cols)):
            if any(i < 0 or i >= bound for i in idx):
                raise ValueError(f"{name} index out of range in submatrix of {self.matrix.label!r}")
            if any(a >= b for a, b in zip(idx, idx[1:])):
                raise ValueError(f"{name} indices must be strictly increasing")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_set), len(self.col_list)

    def entry(self, r: int, c: int) -> str:
        """Variable at local position (r, c)."""
        return self.matrix.entries[self.row_set[r]][self.col_list[c]]

    def grid(self) -> list[list[str]]:
        return [[self.entry(r, c) for c in range(len(self.col_list))]
                for r in range(len(self.row_set))]


@dataclass(frozen=True)
class MixedBinaryProgram:
    variables: tuple[VariableDecl, ...]
    constraints: tuple[LinearConstraint, ...] = ()
    sense: str = MAXIMIZE
    matrices: tuple[VarMatrix, ...] = ()
    name: str = ""
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "matrices", tuple(self.matrices))
        object.__setattr__(self, "_index", {v.id: i for i, v in enumerate(self.variables)})

    def __hash__(self):
        return id(self)

    @property
    def index(self) -> dict[str, int]:
        """Variable id -> position in declaration order."""
        return self._index

    def var(self, vid: str) -> VariableDecl:
        return self.variables[self._index[vid]]

    @property
    def binary_ids(self) -> list[str]:
        return [v.id for v in self.variables if v.is_binary]

    @property
    def continuous_ids(self) -> list[str]:
        return [v.id for v in self.variables if not v.is_binary]

    def extend(self, variables: Iterable[VariableDecl] = (),
               constraints: Iterable[LinearConstraint] = (),
               matrices: Sequence[VarMatrix] | None = None,
               name: str | None = None) -> "MixedBinaryProgram":
        """New program with extra variables/constraints (matrices optionally replaced)."""
        return MixedBinaryProgram(
            variables=self.variables + tuple(variables),
            constraints=self.constraints + tuple(constraints),
            sense=self.sense,
            matrices=self.matrices if matrices is None else tuple(matrices),
            name=self.name if name is None else name,
        )

    def better(self, a, b) -> bool:
        """True if objective value ``a`` is strictly better than ``b``."""
        return a > b if self.sense == MAXIMIZE else a < b


def _row_sum_implied(program: MixedBinaryProgram, row_vars: set[str], want_eq: bool) -> bool:
    """Is there a constraint implying sum(row_vars) <= 1 (or == 1 if want_eq)?

    Accepts constraints whose terms are exactly the row variables with unit
    coefficients, or a superset of nonnegative-binary terms with unit coefficients
    (a set-packing row covering the matrix row) for the packing case.
    """
    for con in program.constraints:
        coefs = dict(con.terms)
        if not row_vars.issubset(coefs):
            continue
        if any(coefs[v] != 1 for v in row_vars):
            continue
        extra = set(coefs) - row_vars
        if want_eq:
            if extra or con.upper != 1 or con.lower != 1:
                continue
            return True
        if con.upper != 1:
            continue
        if all(coefs[v] >= 0 and program.var(v).is_binary and program.var(v).lower >= 0
               for v in extra):
            return True
    return False


def validate(program: MixedBinaryProgram) -> list[str]:
    """Return human-readable invariant violations; empty means well-formed."""
    problems: list[str] = []
    if program.sense not in (MAXIMIZE, MINIMIZE):
        problems.append(f"unknown sense {program.sense!r}")
    seen: set[str] = set()
    for v in program.variables:
        if v.id in seen:
            problems.append(f"duplicate variable id {v.id!r}")
        seen.add(v.id)
        if v.kind not in (BINARY, CONTINUOUS):
            problems.append(f"variable {v.id!r} has unknown kind {v.kind!r}")
            continue
        if v.lower is None or v.upper is None:
            problems.append(f"variable {v.id!r} has an infinite bound")
            continue
        if v.lower > v.upper:
            problems.append(f"variable {v.id!r} has lower > upper")
        if v.is_binary and (v.lower not in (0, 1) or v.upper not in (0, 1)):
            problems.append(f"binary variable {v.id!r} has bounds outside {{0,1}}")
    for k, con in enumerate(program.constraints):
        cname = con.name or f"#{k}"
        ids = [vid for vid, _ in con.terms]
        for vid in ids:
            if vid not in seen:
                problems.append(f"constraint {cname} references unknown variable {vid!r}")
        if len(set(ids)) != len(ids):
            problems.append(f"constraint {cname} repeats a variable")
        if con.lower is not None and con.upper is not None and con.lower > con.upper:
            problems.append(f"constraint {cname} has lower > upper")
    for mat in program.matrices:
        mname = mat.label or "<unnamed matrix>"
        if mat.kind not in ORBITOPE_KINDS:
            problems.append(f"matrix {mname} has unknown kind {mat.kind!r}")
        if any(len(row) != mat.cols for row in mat.entries):
            problems.append(f"matrix {mname} is ragged")
        flat = mat.variables()
        if len(set(flat)) != len(flat):
            problems.append(f"matrix {mname} repeats a variable")
        for vid in flat:
            if vid not in seen:
                problems.append(f"matrix {mname} references unknown variable {vid!r}")
            elif not program.var(vid).is_binary:
                problems.append(f"matrix {mname} contains non-binary variable {vid!r}")
        if mat.kind in (PACKING, PARTITIONING):
            for r, row in enumerate(mat.entries):
                if not all(v in seen for v in row):
                    continue
                if not _row_sum_implied(program, set(row), mat.kind == PARTITIONING):
                    rule = "= 1" if mat.kind == PARTITIONING else "<= 1"
                    problems.append(f"matrix {mname} row {r} lacks a row-sum {rule} constraint")
    return problems


@dataclass(frozen=True)
class Evaluation:
    objective: Fraction
    feasible: bool


def evaluate(program: MixedBinaryProgram, assignment: Mapping[str, object]) -> Evaluation:
    """Exact objective and feasibility of a full assignment."""
    missing = [v.id for v in program.variables if v.id not in assignment]
    if missing:
        raise ValueError(f"incomplete assignment: missing {missing[:5]}")
    values = {v.id: as_rational(assignment[v.id]) for v in program.variables}
    feasible = True
    for v in program.variables:
        x = values[v.id]
        if x < v.lower or x > v.upper:
            feasible = False
        if v.is_binary and x not in (0, 1):
            feasible = False
    if feasible:
        feasible = all(con.is_satisfied(values) for con in program.constraints)
    objective = sum((v.objective * values[v.id] for v in program.variables), Fraction(0))
    return Evaluation(objective, feasible)


# -- serialization -----------------------------------------------------------

def _num(x: Fraction | None):
    if x is None:
        return None
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def to_dict(program: MixedBinaryProgram) -> dict:
    return {
        "format": "actsym.program",
        "version": FORMAT_VERSION,
        "name": program.name,
        "sense": program.sense,
        "variables": [
            {"id": v.id, "kind": v.kind, "lower": _num(v.lower), "upper": _num(v.upper),
             "objective": _num(v.objective)}
            for v in program.variables
        ],
        "constraints": [
            {"name": c.name, "lower": _num(c.lower), "upper": _num(c.upper),
             "terms": [[vid, _num(coef)] for vid, coef in c.terms]}
            for c in program.constraints
        ],
        "matrices": [
            {"label": m.label, "kind": m.kind, "symmetric": m.symmetric, "role": m.role,
             "entries": [list(row) for row in m.entries]}
            for m in program.matrices
        ],
    }


def from_dict(data: Mapping) -> MixedBinaryProgram:
    if data.get("format") != "actsym.program":
        raise ValueError("not a serialized actsym program")
    return MixedBinaryProgram(
        variables=[VariableDecl(v["id"], v["kind"], v["lower"], v["upper"], v["objective"])
                   for v in data["variables"]],
        constraints=[LinearConstraint(tuple((t[0], t[1]) for t in c["terms"]),
                                      c["lower"], c["upper"], c.get("name", ""))
                     for c in data["constraints"]],
        sense=data["sense"],
        matrices=[VarMatrix(m["entries"], m["kind"], m.get("label", ""),
                            m.get("symmetric", False), m.get("role", ""))
                  for m in data.get("matrices", [])],
        name=data.get("name", ""),
    )


def dumps(program: MixedBinaryProgram) -> str:
    """Canonical text form: fixed key order, one program per string."""
    return json.dumps(to_dict(program), indent=1, sort_keys=False) + "\n"


def loads(text: str) -> MixedBinaryProgram:
    return from_dict(json.loads(text))
