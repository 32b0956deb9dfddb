"""Metric 2-step nilpotent Lie algebras with a fixed orthonormal basis.

A structure tensor c[i, j, k] fixes the bracket [e_i, e_j] = sum_k c[i,j,k] e_k
on an orthonormal basis e_1 .. e_d.  By convention the leading q = d - l
indices span the horizontal subspace V and the trailing l indices span the
center Z, so the axioms of a 2-step algebra become index conditions on c:
the bracket of horizontal vectors lands in the trailing block, central
vectors bracket to zero, and some entry is nonzero.

All of the metric geometry is channelled through the skew maps

    J(z) : V -> V,    <J(z) x, y> = <[x, y], z>,

which this module exposes alongside the bracket.  Algebras are immutable
and every operation is a pure function, so instances can be shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class NilpotentAlgebra:
    """2-step nilpotent Lie algebra with orthonormal basis and split center.

    Vectors are plain float arrays of length ``dim_total`` holding
    coordinates in the fixed basis.
    """

    dim_total: int
    dim_center: int
    bracket_tensor: np.ndarray  # c[i, j, k], zero-based indices

    def __post_init__(self):
        if self.dim_center < 1:
            raise ValueError("dim_center must be at least 1")
        if self.dim_center >= self.dim_total:
            raise ValueError("dim_center must be smaller than dim_total")
        tensor = np.ascontiguousarray(np.asarray(self.bracket_tensor, dtype=float))
        d = self.dim_total
        if tensor.shape != (d, d, d):
            raise ValueError(f"bracket tensor must have shape {(d, d, d)}")
        tensor.flags.writeable = False
        object.__setattr__(self, "bracket_tensor", tensor)

    @property
    def dim_v(self) -> int:
        """Dimension q of the horizontal subspace."""
        return self.dim_total - self.dim_center

    @property
    def n(self) -> int:
        """Dimension of a hypersurface in the group, dim_total - 1."""
        return self.dim_total - 1

    def v_part(self, vec) -> np.ndarray:
        out = np.array(vec, dtype=float)
        out[self.dim_v:] = 0.0
        return out

    def z_part(self, vec) -> np.ndarray:
        out = np.array(vec, dtype=float)
        out[: self.dim_v] = 0.0
        return out

    def bracket(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape != (self.dim_total,) or y.shape != (self.dim_total,):
            raise ValueError("bracket arguments must have length dim_total")
        return np.einsum("ijk,i,j->k", self.bracket_tensor, x, y)

    def j_matrix(self, z) -> np.ndarray:
        """Matrix of J(z) acting on full-length vectors (zero off V)."""
        z = np.asarray(z, dtype=float)
        if z.shape != (self.dim_total,):
            raise ValueError("central argument must have length dim_total")
        return np.einsum("ijk,k->ji", self.bracket_tensor, z)

    def j_apply(self, z, x, tol: float = 1e-10) -> np.ndarray:
        """J(z) x for z in the center and x horizontal."""
        z = np.asarray(z, dtype=float)
        x = np.asarray(x, dtype=float)
        if np.linalg.norm(self.v_part(z)) > tol:
            raise ValueError("first argument of j_apply must lie in the center")
        if np.linalg.norm(self.z_part(x)) > tol:
            raise ValueError("second argument of j_apply must be horizontal")
        return self.j_matrix(z) @ x


def heisenberg(m: int) -> NilpotentAlgebra:
    """The 2m+1 dimensional algebra with relations [K_i, L_j] = delta_ij Z.

    Basis order K_1..K_m, L_1..L_m, Z; the center is the line through Z.
    """
    if m < 1:
        raise ValueError("m must be a positive integer")
    d = 2 * m + 1
    c = np.zeros((d, d, d))
    for i in range(m):
        c[i, m + i, d - 1] = 1.0
        c[m + i, i, d - 1] = -1.0
    return NilpotentAlgebra(dim_total=d, dim_center=1, bracket_tensor=c)


@dataclass(frozen=True)
class Violation:
    name: str
    magnitude: float


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def names(self) -> list[str]:
        return [v.name for v in self.violations]


def validate(alg: NilpotentAlgebra, tol: float = 1e-10) -> ValidationReport:
    """Check the 2-step axioms; violations are data, not exceptions.

    The "true center" check stacks the J matrices of the central basis
    vectors: a horizontal vector killed by all of them would commute with
    the whole algebra, so the declared center would be too small.  That
    is detected through the smallest singular value of the stack.
    """
    c = alg.bracket_tensor
    q = alg.dim_v
    found = []

    antisym = np.abs(c + np.transpose(c, (1, 0, 2))).max()
    if antisym > tol:
        found.append(Violation("antisymmetry", float(antisym)))

    into_v = np.abs(c[:, :, :q]).max() if q > 0 else 0.0
    if into_v > tol:
        found.append(Violation("bracket lands in center", float(into_v)))

    central_rows = max(np.abs(c[q:, :, :]).max(), np.abs(c[:, q:, :]).max())
    if central_rows > tol:
        found.append(Violation("center is central", float(central_rows)))

    top = np.abs(c).max()
    if top <= tol:
        found.append(Violation("non-abelian", float(top)))

    stacked = np.vstack([alg.j_matrix(_basis(alg, k))[:q, :q] for k in range(q, alg.dim_total)])
    smin = np.linalg.svd(stacked, compute_uv=False)[-1] if stacked.size else 0.0
    if smin <= tol:
        found.append(Violation("true center", float(smin)))

    return ValidationReport(tuple(found))


def _basis(alg: NilpotentAlgebra, k: int) -> np.ndarray:
    e = np.zeros(alg.dim_total)
    e[k] = 1.0
    return e


def is_heisenberg_type(alg: NilpotentAlgebra, tol: float = 1e-10) -> bool:
    """True when J(z)^2 = -|z|^2 Id on V for every central z.

    J(z)^2 is quadratic in z, so checking the central basis vectors and
    all sums of two of them polarizes the identity to the whole center.
    """
    q = alg.dim_v
    eye = np.eye(q)
    zs = [_basis(alg, k) for k in range(q, alg.dim_total)]
    worst = 0.0
    for a, za in enumerate(zs):
        ja = alg.j_matrix(za)[:q, :q]
        worst = max(worst, np.abs(ja @ ja + eye).max())
        for zb in zs[a + 1:]:
            jj = alg.j_matrix(za + zb)[:q, :q]
            worst = max(worst, np.abs(jj @ jj + 2.0 * eye).max())
    return worst <= tol


def algebra_from_json(data: dict) -> NilpotentAlgebra:
    """Build an algebra from the JSON description.

    Expected document: ``{"dim_total": d, "dim_center": l,
    "brackets": [{"i": .., "j": .., "k": .., "c": ..}, ...]}`` with
    one-based indices and only i < j entries; the antisymmetric mirror
    is filled in automatically.
    """
    try:
        d = int(data["dim_total"])
        l = int(data["dim_center"])
        entries = data.get("brackets", [])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed algebra document: {exc}") from exc
    c = np.zeros((d, d, d))
    for ent in entries:
        i, j, k = int(ent["i"]), int(ent["j"]), int(ent["k"])
        val = float(ent["c"])
        if not (1 <= i <= d and 1 <= j <= d and 1 <= k <= d):
            raise ValueError(f"bracket entry index out of range: {ent}")
        if i >= j:
            raise ValueError(f"bracket entries must have i < j, got i={i}, j={j}")
        c[i - 1, j - 1, k - 1] += val
        c[j - 1, i - 1, k - 1] -= val
    return NilpotentAlgebra(dim_total=d, dim_center=l, bracket_tensor=c)
