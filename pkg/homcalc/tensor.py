from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence, Union

import sympy as sp

from homcalc.config import DEFAULT_SETTINGS, Settings
from homcalc.errors import ChartMismatch, DegreeError, KindMismatch, NotNondegenerate, ShapeMismatch
from homcalc.expr import ONE, ZERO, Chart, Expr, as_expr, differentiate, normalize

logger = logging.getLogger(__name__)

Index = tuple[int, ...]


def sort_index(idx: Sequence[int]) -> tuple[int, Index]:
    """Sign of the sorting permutation and the sorted tuple; sign 0 on a repeat."""
    idx = tuple(idx)
    if len(set(idx)) != len(idx):
        return 0, ()
    inversions = sum(1 for a in range(len(idx)) for b in range(a + 1, len(idx)) if idx[a] > idx[b])
    return (-1 if inversions % 2 else 1), tuple(sorted(idx))


def shuffle_sign(first: Sequence[int], second: Sequence[int]) -> int:
    inversions = sum(1 for a in first for b in second if a > b)
    return -1 if inversions % 2 else 1


def split_positions(total: int, size: int) -> Iterator[tuple[Index, Index, int]]:
    """All (A, B, sign) with A a size-subset of range(total) and B its complement."""
    for first in combinations(range(total), size):
        second = tuple(i for i in range(total) if i not in first)
        yield first, second, shuffle_sign(first, second)


def _resolve(chart: Chart, idx) -> Index:
    if isinstance(idx, (str, int)):
        idx = (idx,)
    return tuple(chart.index(i) if isinstance(i, str) else int(i) for i in idx)


@dataclass(frozen=True)
class VectorField:
    chart: Chart
    components: tuple[Expr, ...]

    def __post_init__(self) -> None:
        comps = tuple(normalize(c) for c in self.components)
        if len(comps) != self.chart.dim:
            raise ShapeMismatch(f"Vector field needs {self.chart.dim} components, got {len(comps)}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def zero(cls, chart: Chart) -> VectorField:
        return cls(chart, (ZERO,) * chart.dim)

    @classmethod
    def coordinate(cls, chart: Chart, var: str | int) -> VectorField:
        i = chart.index(var) if isinstance(var, str) else var
        return cls(chart, tuple(ONE if j == i else ZERO for j in range(chart.dim)))

    @classmethod
    def from_dict(cls, chart: Chart, values: Mapping[str, object]) -> VectorField:
        comps = [ZERO] * chart.dim
        for var, value in values.items():
            comps[chart.index(var)] = as_expr(value)
        return cls(chart, tuple(comps))

    def __call__(self, f) -> Expr:
        f = as_expr(f)
        return normalize(sum((c * sp.diff(f, s) for c, s in zip(self.components, self.chart.symbols) if c != 0), ZERO))

    def _same(self, other: VectorField) -> None:
        self.chart.require_same(other.chart)

    def __add__(self, other: VectorField) -> VectorField:
        self._same(other)
        return VectorField(self.chart, tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: VectorField) -> VectorField:
        self._same(other)
        return VectorField(self.chart, tuple(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> VectorField:
        return VectorField(self.chart, tuple(-a for a in self.components))

    def scale(self, f) -> VectorField:
        f = as_expr(f)
        return VectorField(self.chart, tuple(f * a for a in self.components))

    def substitute(self, mapping: Mapping) -> VectorField:
        return VectorField(self.chart, tuple(a.xreplace(mapping) for a in self.components))

    def as_multivector(self) -> Multivector:
        return Multivector(self.chart, 1, {(i,): c for i, c in enumerate(self.components)})

    def residuals(self) -> list[Expr]:
        return [c for c in self.components if c != 0]

    def __str__(self) -> str:
        terms = [f"({c})*D{v}" for c, v in zip(self.components, self.chart.vars) if c != 0]
        return " + ".join(terms) or "0"


class _Alternating:
    """Shared storage for forms and multivectors: increasing index tuples only."""

    chart: Chart
    degree: int
    components: Mapping[Index, Expr]
    _symbol = "?"

    def __post_init__(self) -> None:
        if self.degree < 0:
            raise DegreeError(f"Negative degree {self.degree}")
        clean: dict[Index, Expr] = {}
        for idx, value in dict(self.components).items():
            idx = _resolve(self.chart, idx)
            if len(idx) != self.degree or any(not 0 <= i < self.chart.dim for i in idx):
                raise ShapeMismatch(f"Index {idx} does not fit degree {self.degree} on {self.chart.vars}")
            sign, key = sort_index(idx)
            if sign == 0:
                raise ShapeMismatch(f"Repeated index {idx}")
            clean[key] = clean.get(key, ZERO) + sign * as_expr(value)
        normalized = {k: normalize(v) for k, v in sorted(clean.items())}
        object.__setattr__(self, "components", {k: v for k, v in normalized.items() if v != 0})

    @classmethod
    def zero(cls, chart: Chart, degree: int):
        return cls(chart, degree, {})

    @classmethod
    def scalar(cls, chart: Chart, f):
        return cls(chart, 0, {(): f})

    def indices(self) -> Iterator[Index]:
        return combinations(range(self.chart.dim), self.degree)

    def value(self, idx: Sequence[int]) -> Expr:
        sign, key = sort_index(idx)
        if sign == 0:
            return ZERO
        return sign * self.components.get(key, ZERO)

    def function(self) -> Expr:
        if self.degree != 0:
            raise DegreeError(f"Degree {self.degree} object is not a function")
        return self.components.get((), ZERO)

    def _same(self, other) -> None:
        if type(self) is not type(other):
            raise KindMismatch(f"Cannot combine {type(self).__name__} with {type(other).__name__}")
        self.chart.require_same(other.chart)
        if self.degree != other.degree:
            raise DegreeError(f"Degree {self.degree} vs {other.degree}")

    def _combine(self, other, sign: int):
        self._same(other)
        data = dict(self.components)
        for k, v in other.components.items():
            data[k] = data.get(k, ZERO) + sign * v
        return type(self)(self.chart, self.degree, data)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, f):
        f = as_expr(f)
        return type(self)(self.chart, self.degree, {k: f * v for k, v in self.components.items()})

    def map_components(self, fn):
        return type(self)(self.chart, self.degree, {k: fn(k, v) for k, v in self.components.items()})

    def substitute(self, mapping: Mapping):
        return type(self)(self.chart, self.degree, {k: v.xreplace(mapping) for k, v in self.components.items()})

    def residuals(self) -> list[Expr]:
        return list(self.components.values())

    def _evaluate(self, columns: Sequence[Sequence[Expr]]) -> Expr:
        if len(columns) != self.degree:
            raise DegreeError(f"Expected {self.degree} arguments, got {len(columns)}")
        if self.degree == 0:
            return self.function()
        total = ZERO
        for idx, coeff in self.components.items():
            minor = sp.Matrix([[columns[b][i] for b in range(self.degree)] for i in idx])
            total += coeff * minor.det(method="berkowitz")
        return normalize(total)

    def to_dict(self) -> dict[str, str]:
        return {",".join(self.chart.vars[i] for i in k): str(v) for k, v in self.components.items()}

    def __str__(self) -> str:
        if not self.components:
            return "0"
        terms = []
        for k, v in self.components.items():
            basis = "^".join(f"{self._symbol}{self.chart.vars[i]}" for i in k)
            terms.append(f"({v})*{basis}" if basis else f"({v})")
        return " + ".join(terms)


@dataclass(frozen=True)
class Form(_Alternating):
    chart: Chart
    degree: int
    components: Mapping[Index, Expr] = field(default_factory=dict)
    _symbol = "d"

    def __call__(self, *vectors: VectorField) -> Expr:
        for v in vectors:
            self.chart.require_same(v.chart)
        return self._evaluate([v.components for v in vectors])


@dataclass(frozen=True)
class Multivector(_Alternating):
    chart: Chart
    degree: int
    components: Mapping[Index, Expr] = field(default_factory=dict)
    _symbol = "D"

    def __call__(self, *forms: Form) -> Expr:
        columns = []
        for f in forms:
            self.chart.require_same(f.chart)
            if f.degree != 1:
                raise DegreeError("Multivectors are evaluated on 1-forms")
            columns.append([f.value((i,)) for i in range(self.chart.dim)])
        return self._evaluate(columns)

    def as_vector_field(self) -> VectorField:
        if self.degree != 1:
            raise DegreeError(f"Degree {self.degree} multivector is not a vector field")
        return VectorField(self.chart, tuple(self.value((i,)) for i in range(self.chart.dim)))


def coordinate_form(chart: Chart, var: str | int) -> Form:
    i = chart.index(var) if isinstance(var, str) else var
    return Form(chart, 1, {(i,): ONE})


def covector(chart: Chart, comps: Sequence) -> Form:
    return Form(chart, 1, {(i,): c for i, c in enumerate(comps)})


@dataclass(frozen=True)
class Tensor11:
    """(1,1)-tensor with N(d_j) = sum_i matrix[i][j] d_i."""

    chart: Chart
    matrix: tuple[tuple[Expr, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(normalize(c) for c in row) for row in self.matrix)
        n = self.chart.dim
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ShapeMismatch(f"Tensor11 on {self.chart.vars} needs a {n}x{n} matrix")
        object.__setattr__(self, "matrix", rows)

    @classmethod
    def identity(cls, chart: Chart) -> Tensor11:
        return cls.diagonal(chart, [ONE] * chart.dim)

    @classmethod
    def diagonal(cls, chart: Chart, entries: Sequence) -> Tensor11:
        n = chart.dim
        return cls(chart, tuple(tuple(as_expr(entries[i]) if i == j else ZERO for j in range(n)) for i in range(n)))

    @classmethod
    def from_matrix(cls, chart: Chart, matrix) -> Tensor11:
        m = sp.Matrix(matrix)
        return cls(chart, tuple(tuple(m[i, j] for j in range(m.cols)) for i in range(m.rows)))

    def as_matrix(self) -> sp.Matrix:
        return sp.Matrix(self.matrix)

    def apply(self, X: VectorField) -> VectorField:
        self.chart.require_same(X.chart)
        n = self.chart.dim
        return VectorField(self.chart, tuple(sum((self.matrix[i][j] * X.components[j] for j in range(n)), ZERO) for i in range(n)))

    def dual_apply(self, alpha: Form) -> Form:
        """N^* alpha, so that N^* dx_i = sum_j matrix[i][j] dx_j."""
        self.chart.require_same(alpha.chart)
        if alpha.degree != 1:
            raise DegreeError("N^* acts on 1-forms")
        n = self.chart.dim
        return covector(self.chart, [sum((alpha.value((i,)) * self.matrix[i][j] for i in range(n)), ZERO) for j in range(n)])

    def compose(self, other: Tensor11) -> Tensor11:
        self.chart.require_same(other.chart)
        return Tensor11.from_matrix(self.chart, self.as_matrix() * other.as_matrix())

    def power(self, k: int) -> Tensor11:
        out = Tensor11.identity(self.chart)
        for _ in range(k):
            out = out.compose(self)
        return out

    def transpose(self) -> Tensor11:
        return Tensor11.from_matrix(self.chart, self.as_matrix().T)

    def __add__(self, other: Tensor11) -> Tensor11:
        self.chart.require_same(other.chart)
        return Tensor11.from_matrix(self.chart, self.as_matrix() + other.as_matrix())

    def __sub__(self, other: Tensor11) -> Tensor11:
        self.chart.require_same(other.chart)
        return Tensor11.from_matrix(self.chart, self.as_matrix() - other.as_matrix())

    def scale(self, f) -> Tensor11:
        return Tensor11.from_matrix(self.chart, as_expr(f) * self.as_matrix())

    def substitute(self, mapping: Mapping) -> Tensor11:
        return Tensor11(self.chart, tuple(tuple(c.xreplace(mapping) for c in row) for row in self.matrix))

    def residuals(self) -> list[Expr]:
        return [c for row in self.matrix for c in row if c != 0]

    def __str__(self) -> str:
        return "[" + "; ".join(", ".join(str(c) for c in row) for row in self.matrix) + "]"


@dataclass(frozen=True)
class VectorValued2Form:
    chart: Chart
    components: Mapping[tuple[int, int], VectorField] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean = {}
        for (i, j), v in dict(self.components).items():
            if i >= j:
                raise ShapeMismatch(f"Vector-valued 2-form keys must be increasing, got {(i, j)}")
            if v.residuals():
                clean[(i, j)] = v
        object.__setattr__(self, "components", dict(sorted(clean.items())))

    def value(self, i: int, j: int) -> VectorField:
        if i == j:
            return VectorField.zero(self.chart)
        if i < j:
            return self.components.get((i, j), VectorField.zero(self.chart))
        return -self.value(j, i)

    def __sub__(self, other: VectorValued2Form) -> VectorValued2Form:
        keys = set(self.components) | set(other.components)
        return VectorValued2Form(self.chart, {k: self.value(*k) - other.value(*k) for k in keys})

    def scale(self, f) -> VectorValued2Form:
        return VectorValued2Form(self.chart, {k: v.scale(f) for k, v in self.components.items()})

    def residuals(self) -> list[Expr]:
        return [c for v in self.components.values() for c in v.residuals()]

    def __str__(self) -> str:
        if not self.components:
            return "0"
        return "; ".join(f"({self.chart.vars[i]},{self.chart.vars[j]}): {v}" for (i, j), v in self.components.items())


@dataclass(frozen=True)
class SmoothMap:
    source: Chart
    target: Chart
    components: tuple[Expr, ...]

    def __post_init__(self) -> None:
        comps = tuple(normalize(c) for c in self.components)
        if len(comps) != self.target.dim:
            raise ShapeMismatch(f"Map into {self.target.vars} needs {self.target.dim} components")
        allowed = set(self.source.symbols)
        for c in comps:
            stray = c.free_symbols - allowed
            if stray:
                raise ChartMismatch(f"Map component {c} uses {sorted(map(str, stray))} outside {self.source.vars}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def identity(cls, chart: Chart) -> SmoothMap:
        return cls(chart, chart, chart.symbols)

    @classmethod
    def from_names(cls, source: Chart, target: Chart, names: Sequence[str]) -> SmoothMap:
        return cls(source, target, tuple(source.symbol(n) for n in names))

    def substitution(self) -> dict[sp.Symbol, Expr]:
        return dict(zip(self.target.symbols, self.components))

    def compose(self, inner: SmoothMap) -> SmoothMap:
        """self after inner."""
        self.source.require_same(inner.target)
        sub = inner.substitution()
        return SmoothMap(inner.source, self.target, tuple(c.xreplace(sub) for c in self.components))

    def jacobian(self) -> sp.Matrix:
        return sp.Matrix([[differentiate(c, s) for s in self.source.symbols] for c in self.components])

    def residuals_against(self, other: SmoothMap) -> list[Expr]:
        self.source.require_same(other.source)
        self.target.require_same(other.target)
        return [normalize(a - b) for a, b in zip(self.components, other.components)]


Tensor = Union[Form, Multivector, Tensor11, VectorField]


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    X.chart.require_same(Y.chart)
    return VectorField(X.chart, tuple(X(Y.components[i]) - Y(X.components[i]) for i in range(X.chart.dim)))


def ext_d(omega: Form) -> Form:
    chart = omega.chart
    syms = chart.symbols
    out = {}
    for idx in combinations(range(chart.dim), omega.degree + 1):
        total = ZERO
        for j, i in enumerate(idx):
            rest = idx[:j] + idx[j + 1 :]
            coeff = omega.components.get(rest)
            if coeff is not None:
                total += (-1) ** j * sp.diff(coeff, syms[i])
        out[idx] = total
    return Form(chart, omega.degree + 1, out)


def interior(X: VectorField, omega: Form) -> Form:
    X.chart.require_same(omega.chart)
    if omega.degree < 1:
        raise DegreeError("Interior product of a 0-form")
    out = {}
    for rest in combinations(range(omega.chart.dim), omega.degree - 1):
        out[rest] = sum((X.components[a] * omega.value((a,) + rest) for a in range(omega.chart.dim) if X.components[a] != 0), ZERO)
    return Form(omega.chart, omega.degree - 1, out)


def interior_form(alpha: Form, P: Multivector) -> Multivector:
    alpha.chart.require_same(P.chart)
    if P.degree < 1:
        raise DegreeError("Interior product of a 0-vector")
    if alpha.degree != 1:
        raise DegreeError("Only 1-forms are inserted into multivectors")
    out = {}
    for rest in combinations(range(P.chart.dim), P.degree - 1):
        out[rest] = sum((alpha.value((a,)) * P.value((a,) + rest) for a in range(P.chart.dim)), ZERO)
    return Multivector(P.chart, P.degree - 1, out)


def wedge(a, b):
    if type(a) is not type(b) or not isinstance(a, (Form, Multivector)):
        raise KindMismatch("wedge needs two forms or two multivectors")
    a.chart.require_same(b.chart)
    p, q = a.degree, b.degree
    out = {}
    for idx in combinations(range(a.chart.dim), p + q):
        total = ZERO
        for first, second, sign in split_positions(p + q, p):
            left = a.components.get(tuple(idx[i] for i in first))
            if left is None:
                continue
            right = b.components.get(tuple(idx[i] for i in second))
            if right is not None:
                total += sign * left * right
        out[idx] = total
    return type(a)(a.chart, p + q, out)


def schouten(P: Multivector, Q: Multivector) -> Multivector:
    """Schouten bracket via the explicit component form of the Gerstenhaber formula."""
    P.chart.require_same(Q.chart)
    chart = P.chart
    syms = chart.symbols
    n = chart.dim
    p, q = P.degree, Q.degree
    deg = p + q - 1
    if deg < 0:
        raise DegreeError("Schouten bracket of two functions")
    outer_sign = (-1) ** ((p + 1) * (q + 1))
    out = {}
    for idx in combinations(range(n), deg):
        total = ZERO
        if p >= 1:
            for first, second, sign in split_positions(deg, q):
                inner = Q.components.get(tuple(idx[i] for i in first))
                if inner is None:
                    continue
                rest = tuple(idx[i] for i in second)
                for l in range(n):
                    coeff = P.value((l,) + rest)
                    if coeff != 0:
                        total += sign * coeff * sp.diff(inner, syms[l])
        if q >= 1:
            for first, second, sign in split_positions(deg, p):
                inner = P.components.get(tuple(idx[i] for i in first))
                if inner is None:
                    continue
                rest = tuple(idx[i] for i in second)
                for l in range(n):
                    coeff = Q.value((l,) + rest)
                    if coeff != 0:
                        total -= outer_sign * sign * coeff * sp.diff(inner, syms[l])
        out[idx] = total
    return Multivector(chart, deg, out)


def lie_derivative_tensor11(X: VectorField, N: Tensor11) -> Tensor11:
    X.chart.require_same(N.chart)
    syms = X.chart.symbols
    n = X.chart.dim
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            total = X(N.matrix[i][j])
            for k in range(n):
                total += N.matrix[i][k] * sp.diff(X.components[k], syms[j])
                total -= N.matrix[k][j] * sp.diff(X.components[i], syms[k])
            row.append(total)
        rows.append(tuple(row))
    return Tensor11(X.chart, tuple(rows))


def lie_derivative(X: VectorField, T):
    if isinstance(T, Form):
        X.chart.require_same(T.chart)
        if T.degree == 0:
            return Form.scalar(T.chart, X(T.function()))
        return interior(X, ext_d(T)) + ext_d(interior(X, T))
    if isinstance(T, Multivector):
        return schouten(X.as_multivector(), T)
    if isinstance(T, Tensor11):
        return lie_derivative_tensor11(X, T)
    if isinstance(T, VectorField):
        return lie_bracket(X, T)
    if isinstance(T, sp.Basic):
        return X(T)
    raise KindMismatch(f"No Lie derivative for {type(T).__name__}")


def fn_bracket(U: Tensor11, V: Tensor11) -> VectorValued2Form:
    U.chart.require_same(V.chart)
    chart = U.chart
    n = chart.dim
    coords = [VectorField.coordinate(chart, i) for i in range(n)]
    out = {}
    for i, j in combinations(range(n), 2):
        a, b = coords[i], coords[j]

        def half(S: Tensor11, T: Tensor11) -> VectorField:
            return (
                lie_bracket(S.apply(a), T.apply(b))
                - S.apply(lie_bracket(T.apply(a), b))
                - S.apply(lie_bracket(a, T.apply(b)))
            )

        out[(i, j)] = half(U, V) + half(V, U)
    return VectorValued2Form(chart, out)


def nijenhuis_torsion(N: Tensor11) -> VectorValued2Form:
    chart = N.chart
    coords = [VectorField.coordinate(chart, i) for i in range(chart.dim)]
    out = {}
    for i, j in combinations(range(chart.dim), 2):
        a, b = coords[i], coords[j]
        out[(i, j)] = (
            lie_bracket(N.apply(a), N.apply(b))
            - N.apply(lie_bracket(N.apply(a), b))
            - N.apply(lie_bracket(a, N.apply(b)))
        )
    return VectorValued2Form(chart, out)


def pullback_fn(phi: SmoothMap, f) -> Expr:
    return normalize(as_expr(f).xreplace(phi.substitution()))


def pullback(phi: SmoothMap, omega: Form) -> Form:
    phi.target.require_same(omega.chart)
    if omega.degree == 0:
        return Form.scalar(phi.source, pullback_fn(phi, omega.function()))
    jac = phi.jacobian()
    sub = phi.substitution()
    k = omega.degree
    out = {}
    for idx in combinations(range(phi.source.dim), k):
        total = ZERO
        for target_idx, coeff in omega.components.items():
            minor = jac.extract(list(target_idx), list(idx))
            det = minor.det(method="berkowitz")
            if det != 0:
                total += coeff.xreplace(sub) * det
        out[idx] = total
    return Form(phi.source, k, out)


def pushforward(phi: SmoothMap, X: VectorField) -> tuple[Expr, ...]:
    """Components of dphi(X) in target coordinates, as functions on the source."""
    phi.source.require_same(X.chart)
    return tuple(X(c) for c in phi.components)


def _inserted_value(N: Tensor11, T, slot: int, idx: Sequence[int]) -> Expr:
    n = N.chart.dim
    total = ZERO
    for c in range(n):
        coeff = N.matrix[c][idx[slot]] if isinstance(T, Form) else N.matrix[idx[slot]][c]
        if coeff != 0:
            total += coeff * T.value(tuple(idx[:slot]) + (c,) + tuple(idx[slot + 1 :]))
    return total


def contract11(N: Tensor11, T, slot: int = 0):
    """Insert N (or N^* for multivectors) into the given argument slot."""
    if not isinstance(T, (Form, Multivector)):
        raise KindMismatch("contract11 needs a form or a multivector")
    N.chart.require_same(T.chart)
    if not 0 <= slot < T.degree:
        raise DegreeError(f"Slot {slot} out of range for degree {T.degree}")
    return type(T)(T.chart, T.degree, {idx: _inserted_value(N, T, slot, idx) for idx in T.indices()})


def skewness_residuals(N: Tensor11, T) -> list[Expr]:
    """T(N-, -) + T(-, N-) style symmetric part of a contracted 2-tensor."""
    if T.degree != 2:
        raise DegreeError("Skewness is checked on degree 2 tensors")
    n = T.chart.dim
    return [
        normalize(_inserted_value(N, T, 0, (a, b)) + _inserted_value(N, T, 0, (b, a)))
        for a in range(n)
        for b in range(a, n)
    ]


def transpose(N: Tensor11) -> Tensor11:
    return N.transpose()


def tensor11_compose(A: Tensor11, B: Tensor11) -> Tensor11:
    return A.compose(B)


def sharp(pi: Multivector, alpha: Form) -> VectorField:
    return interior_form(alpha, pi).as_vector_field()


def koszul_bracket(pi: Multivector, alpha: Form, beta: Form) -> Form:
    return (
        lie_derivative(sharp(pi, alpha), beta)
        - lie_derivative(sharp(pi, beta), alpha)
        - ext_d(Form.scalar(pi.chart, pi(alpha, beta)))
    )


def form_matrix(T) -> sp.Matrix:
    if T.degree != 2:
        raise DegreeError("Matrix view needs degree 2")
    n = T.chart.dim
    return sp.Matrix(n, n, lambda a, b: T.value((a, b)))


bivector_matrix = form_matrix


def form_from_matrix(chart: Chart, matrix) -> Form:
    return Form(chart, 2, {(a, b): matrix[a, b] for a, b in combinations(range(chart.dim), 2)})


def bivector_from_matrix(chart: Chart, matrix) -> Multivector:
    return Multivector(chart, 2, {(a, b): matrix[a, b] for a, b in combinations(range(chart.dim), 2)})


def invert_matrix(matrix: sp.Matrix, settings: Settings = DEFAULT_SETTINGS) -> sp.Matrix:
    """Adjugate inverse over the rational-function field."""
    if matrix.rows > settings.max_inverse_size:
        raise DegreeError(f"Matrix of size {matrix.rows} exceeds the inversion limit {settings.max_inverse_size}")
    det = normalize(matrix.det(method="berkowitz"))
    if det == 0:
        raise NotNondegenerate("Matrix is singular")
    adj = matrix.adjugate(method="berkowitz")
    return adj.applyfunc(lambda c: normalize(c / det))


def residuals_of(objects: Iterable) -> list[Expr]:
    out: list[Expr] = []
    for obj in objects:
        if isinstance(obj, sp.Basic):
            out.append(normalize(obj))
        else:
            out.extend(obj.residuals())
    return out
