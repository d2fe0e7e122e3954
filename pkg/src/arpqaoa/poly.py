"""Multilinear pseudo-Boolean polynomials and their Ising (spin) form.

``PBPoly`` stores terms as ``frozenset(variables) -> coefficient``; since
``x**2 == x`` for binary variables, products are reduced by set union. The
constant is kept apart so it can be dropped without touching the argmin.

Variables may be any hashable label. Formulations use :class:`VarId`;
circuits and simulators work with integer qubit indices.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Iterable, Mapping

import numpy as np

ZERO_TOL = 1e-12


@dataclass(frozen=True, order=True)
class VarId:
    """A formulation variable.

    ``kind`` is ``"edge"`` for x[u,v,i] (move u->v at step i), ``"node"``
    for x[u,i] (at node u after step i) or ``"slack"`` for z[j].
    """

    kind: str
    u: str = ""
    v: str = ""
    step: int = 0

    @classmethod
    def edge(cls, u: str, v: str, step: int) -> "VarId":
        return cls("edge", u, v, step)

    @classmethod
    def node(cls, u: str, step: int) -> "VarId":
        return cls("node", u, "", step)

    @classmethod
    def slack(cls, j: int) -> "VarId":
        return cls("slack", "", "", j)

    def __str__(self) -> str:
        if self.kind == "edge":
            return f"x[{self.u},{self.v},{self.step}]"
        if self.kind == "node":
            return f"x[{self.u},{self.step}]"
        return f"z[{self.step}]"

    @classmethod
    def parse(cls, name: str) -> "VarId":
        m = re.fullmatch(r"([xz])\[([^\]]*)\]", name)
        if not m:
            raise ValueError(f"bad variable name {name!r}")
        parts = m.group(2).split(",")
        if m.group(1) == "z" and len(parts) == 1:
            return cls.slack(int(parts[0]))
        if m.group(1) == "x" and len(parts) == 2:
            return cls.node(parts[0], int(parts[1]))
        if m.group(1) == "x" and len(parts) == 3:
            return cls.edge(parts[0], parts[1], int(parts[2]))
        raise ValueError(f"bad variable name {name!r}")


def _order(var) -> tuple:
    return (type(var).__name__, var)


def sorted_vars(vars_: Iterable[Hashable]) -> list:
    return sorted(vars_, key=_order)


def _clean(terms: dict) -> dict:
    return {k: c for k, c in terms.items() if abs(c) > ZERO_TOL}


class PBPoly:
    """Multilinear polynomial over binary variables."""

    __slots__ = ("terms", "constant")

    def __init__(self, terms: Mapping | None = None, constant: float = 0.0):
        merged: dict = {}
        for key, coeff in (terms or {}).items():
            key = frozenset(key)
            if not key:
                constant += coeff
                continue
            merged[key] = merged.get(key, 0.0) + coeff
        self.terms = _clean(merged)
        self.constant = float(constant)

    @classmethod
    def var(cls, v: Hashable, coeff: float = 1.0) -> "PBPoly":
        return cls({frozenset([v]): coeff})

    @classmethod
    def const(cls, c: float) -> "PBPoly":
        return cls(constant=c)

    @classmethod
    def sum(cls, polys: Iterable["PBPoly"]) -> "PBPoly":
        terms: dict = {}
        constant = 0.0
        for p in polys:
            constant += p.constant
            for k, c in p.terms.items():
                terms[k] = terms.get(k, 0.0) + c
        return cls(terms, constant)

    @property
    def degree(self) -> int:
        return max((len(k) for k in self.terms), default=0)

    @property
    def variables(self) -> set:
        out = set()
        for k in self.terms:
            out |= k
        return out

    def is_zero(self) -> bool:
        return not self.terms and self.constant == 0

    def __add__(self, other):
        if not isinstance(other, PBPoly):
            other = PBPoly.const(other)
        return add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return scale(self, -1.0)

    def __sub__(self, other):
        if not isinstance(other, PBPoly):
            other = PBPoly.const(other)
        return add(self, scale(other, -1.0))

    def __rsub__(self, other):
        return PBPoly.const(other) - self

    def __mul__(self, other):
        if isinstance(other, PBPoly):
            return multiply(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = PBPoly.const(1.0)
        for _ in range(k):
            out = multiply(out, self)
        return out

    def __eq__(self, other):
        if not isinstance(other, PBPoly):
            return NotImplemented
        return self.terms == other.terms and self.constant == other.constant

    def isclose(self, other: "PBPoly", tol: float = 1e-9) -> bool:
        diff = self - other
        return abs(diff.constant) <= tol and all(abs(c) <= tol for c in diff.terms.values())

    def __repr__(self):
        return f"PBPoly({len(self.terms)} terms, degree {self.degree}, constant {self.constant})"

    def relabel(self, mapping: Mapping) -> "PBPoly":
        return PBPoly({frozenset(mapping[v] for v in k): c for k, c in self.terms.items()},
                      self.constant)

    def degree_histogram(self) -> dict[int, int]:
        hist: dict[int, int] = {}
        for k in self.terms:
            hist[len(k)] = hist.get(len(k), 0) + 1
        return dict(sorted(hist.items()))

    def dumps(self) -> str:
        return dumps(self)

    def table(self, n: int) -> np.ndarray:
        return binary_table(self, n)


def add(p: PBPoly, q: PBPoly) -> PBPoly:
    return PBPoly.sum((p, q))


def scale(p: PBPoly, c: float) -> PBPoly:
    return PBPoly({k: v * c for k, v in p.terms.items()}, p.constant * c)


def multiply(p: PBPoly, q: PBPoly) -> PBPoly:
    terms: dict = {}
    pt = list(p.terms.items())
    qt = list(q.terms.items())
    for ka, ca in pt:
        for kb, cb in qt:
            k = ka | kb
            terms[k] = terms.get(k, 0.0) + ca * cb
        if q.constant:
            terms[ka] = terms.get(ka, 0.0) + ca * q.constant
    if p.constant:
        for kb, cb in qt:
            terms[kb] = terms.get(kb, 0.0) + cb * p.constant
    return PBPoly(terms, p.constant * q.constant)


def drop_constant(p: PBPoly) -> tuple[PBPoly, float]:
    return PBPoly(p.terms), p.constant


def substitute(p: PBPoly, v: Hashable, bit: int) -> PBPoly:
    terms: dict = {}
    constant = p.constant
    for k, c in p.terms.items():
        if v not in k:
            terms[k] = terms.get(k, 0.0) + c
        elif bit:
            rest = k - {v}
            if rest:
                terms[rest] = terms.get(rest, 0.0) + c
            else:
                constant += c
    return PBPoly(terms, constant)


def evaluate(p: PBPoly, assignment: Mapping) -> float:
    total = p.constant
    for k, c in p.terms.items():
        try:
            if all(assignment[v] for v in k):
                total += c
        except KeyError as exc:
            raise KeyError(f"assignment is missing variable {exc.args[0]}") from None
    return total


class SpinPoly:
    """Weighted products of Pauli-Z operators over qubit indices."""

    __slots__ = ("terms", "constant")

    def __init__(self, terms: Mapping | None = None, constant: float = 0.0):
        merged: dict = {}
        for key, coeff in (terms or {}).items():
            key = frozenset(key)
            if not key:
                constant += coeff
                continue
            merged[key] = merged.get(key, 0.0) + coeff
        self.terms = _clean(merged)
        self.constant = float(constant)

    @property
    def degree(self) -> int:
        return max((len(k) for k in self.terms), default=0)

    @property
    def num_qubits(self) -> int:
        return max((max(k) + 1 for k in self.terms), default=0)

    def __repr__(self):
        return f"SpinPoly({len(self.terms)} terms, degree {self.degree}, constant {self.constant})"

    def table(self, n: int, include_constant: bool = True) -> np.ndarray:
        return spin_table(self, n, include_constant)


def to_spin(p: PBPoly) -> SpinPoly:
    """Substitute x = (1 + z) / 2 and expand; variables must be qubit indices."""
    terms: dict = {}
    constant = p.constant
    for k, c in p.terms.items():
        w = c / (1 << len(k))
        members = sorted(k)
        for r in range(len(members) + 1):
            for sub in combinations(members, r):
                if sub:
                    key = frozenset(sub)
                    terms[key] = terms.get(key, 0.0) + w
                else:
                    constant += w
    return SpinPoly(terms, constant)


def evaluate_spin(s: SpinPoly, spins: Mapping | np.ndarray) -> float:
    total = s.constant
    for k, c in s.terms.items():
        prod = 1
        for q in k:
            prod *= spins[q]
        total += c * prod
    return total


def _axis_index(n: int, qubits: Iterable[int], fill) -> tuple:
    # qubit 0 is the least-significant bit, i.e. the last axis of a C-ordered (2,)*n view
    idx = [slice(None)] * n
    for q in qubits:
        idx[n - 1 - q] = fill
    return tuple(idx)


def binary_table(p: PBPoly, n: int) -> np.ndarray:
    """Values of ``p`` on every bitstring of ``n`` qubits, index = integer bitstring."""
    out = np.full(1 << n, p.constant, dtype=np.float64)
    if n == 0:
        return out
    view = out.reshape((2,) * n)
    for k, c in p.terms.items():
        view[_axis_index(n, k, 1)] += c
    return out


_SIGN = np.array([-1.0, 1.0])


def spin_table(s: SpinPoly, n: int, include_constant: bool = True) -> np.ndarray:
    """Values of ``s`` at z = 2b - 1 for every bitstring b."""
    out = np.full(1 << n, s.constant if include_constant else 0.0, dtype=np.float64)
    if n == 0:
        return out
    view = out.reshape((2,) * n)
    for k, c in s.terms.items():
        factor = np.full((1,) * n, c)
        for q in k:
            shape = [1] * n
            shape[n - 1 - q] = 2
            factor = factor * _SIGN.reshape(shape)
        view += factor
    return out


def _fmt(c: float) -> str:
    return repr(float(c))


def dumps(p: PBPoly) -> str:
    """One term per line as ``coeff * name1 name2``; the constant is a bare number."""
    lines = []
    if p.constant:
        lines.append(_fmt(p.constant))
    rows = sorted(p.terms.items(), key=lambda kv: (len(kv[0]), [_order(v) for v in sorted_vars(kv[0])]))
    for k, c in rows:
        lines.append(f"{_fmt(c)} * " + " ".join(str(v) for v in sorted_vars(k)))
    return "\n".join(lines) + "\n"


def loads(text: str, parse_var=str) -> PBPoly:
    terms: dict = {}
    constant = 0.0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "*" in line:
            coeff, names = line.split("*", 1)
            key = frozenset(parse_var(name) for name in names.split())
            if not key:
                raise ValueError(f"line {lineno}: term without variables")
            terms[key] = terms.get(key, 0.0) + float(coeff)
        else:
            constant += float(line)
    return PBPoly(terms, constant)
