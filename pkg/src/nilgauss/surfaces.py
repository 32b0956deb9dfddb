"""Parametric hypersurfaces in a coordinate model.

A chart is a tuple of expressions u -> r(u) into model coordinates over a
box domain.  From first and second chart jets everything extrinsic is
computed exactly (no finite differences): tangents expressed in the
left-invariant frame, the induced metric with its first derivatives, the
coordinate second fundamental form, and hence the mean curvature H and
|B|^2.  Finite differences appear only for derivatives of derived scalar
fields such as u -> n H(u).

The Gauss map is the unit normal pulled back to the algebra by the
inverse frame: the one-dimensional orthogonal complement of the tangent
columns, sign-fixed by the chart orientation through the determinant of
(tangents | normal).

``adapted_frame`` builds the pointwise orthonormal frame used by the
closed-form Laplacian: the normal splits into a horizontal part of norm s
and a central part of norm c, the frame contains a distinguished mixed
vector c*u - s*z built from the two unit directions, and the remaining
slots are completed by Gram-Schmidt in basis order (so the construction
is deterministic).  Over a Heisenberg algebra the horizontal completion
instead follows the symplectic pairing X -> J(Z) X, which is the basis the
specialized Laplacian formula is stated in.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import NilpotentAlgebra, is_heisenberg_type
from .expressions import Expr, parse_expression
from .fd import FDParams, directional_derivative
from .models import CoordinateModel, nil_polarized_model

IMMERSION_RANK_TOL = 1e-8


class ImmersionError(ValueError):
    """Chart Jacobian is rank deficient at an evaluated point."""


@dataclass(frozen=True, eq=False)
class SurfaceChart:
    """Immersed hypersurface given by coordinate expressions of u1..un."""

    model: CoordinateModel
    components: tuple[Expr, ...]
    orientation: int = 1
    domain: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        d = self.model.dim
        comps = tuple(self.components)
        if len(comps) != d:
            raise ValueError(f"chart needs {d} component expressions")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        dom = tuple((float(lo), float(hi)) for lo, hi in self.domain)
        if len(dom) != d - 1:
            raise ValueError(f"domain needs {d - 1} axis ranges")
        for lo, hi in dom:
            if not lo < hi:
                raise ValueError("domain bounds must satisfy lo < hi")
        for comp in comps:
            if comp.max_param > d - 1:
                raise ValueError(
                    f"component uses u{comp.max_param} but the chart has "
                    f"{d - 1} parameters"
                )
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "domain", dom)

    @property
    def param_dim(self) -> int:
        return self.model.dim - 1

    def point(self, u) -> np.ndarray:
        vals = [float(x) for x in u]
        return np.array([c(vals) for c in self.components])


@dataclass(eq=False)
class ChartJet:
    """Chart data at one parameter point: value, jets, algebra tangents."""

    point: np.ndarray   # (d,)
    jac: np.ndarray     # (d, n)
    hess: np.ndarray    # (d, n, n)
    ainv: np.ndarray    # inverse frame at point, (d, d)
    tangents: np.ndarray  # tangents in the algebra basis, (d, n)


def chart_jets(chart: SurfaceChart, u) -> ChartJet:
    u = np.asarray(u, dtype=float)
    n = chart.param_dim
    d = chart.model.dim
    if u.shape != (n,):
        raise ValueError(f"parameter point must have length {n}")
    val = np.empty(d)
    jac = np.empty((d, n))
    hess = np.empty((d, n, n))
    for k, comp in enumerate(chart.components):
        jet = comp.jet(u)
        val[k] = jet.val
        jac[k] = jet.grad
        hess[k] = jet.hess
    smin = np.linalg.svd(jac, compute_uv=False)[-1]
    if smin <= IMMERSION_RANK_TOL:
        raise ImmersionError(
            f"chart Jacobian nearly rank deficient at u={u.tolist()} "
            f"(smallest singular value {smin:.3e})"
        )
    ainv = chart.model.frame_inverse(val)
    return ChartJet(point=val, jac=jac, hess=hess, ainv=ainv, tangents=ainv @ jac)


def _gauss_from_tangents(tangents: np.ndarray, orientation: int) -> np.ndarray:
    u_full, _, _ = np.linalg.svd(tangents, full_matrices=True)
    normal = u_full[:, -1]
    det = np.linalg.det(np.column_stack([tangents, normal]))
    if det * orientation < 0.0:
        normal = -normal
    return normal


def gauss_map(chart: SurfaceChart, u) -> np.ndarray:
    """Unit normal at r(u), expressed in the algebra basis."""
    cj = chart_jets(chart, u)
    return _gauss_from_tangents(cj.tangents, chart.orientation)


def induced_metric(chart: SurfaceChart, u) -> np.ndarray:
    cj = chart_jets(chart, u)
    return cj.tangents.T @ cj.tangents


def induced_metric_with_gradient(chart: SurfaceChart, u):
    """Induced metric g_ab(u) and its exact gradient dg[c, a, b]."""
    cj = chart_jets(chart, u)
    fl = chart.model.frame_lin
    # d_c tangent_a = -L(d_c r) d_a r + Ainv d^2_{ac} r
    lc = np.einsum("kji,ic->kjc", fl, cj.jac)
    dtan = -np.einsum("kjc,ja->kac", lc, cj.jac) + np.einsum(
        "kj,jac->kac", cj.ainv, cj.hess
    )
    t = cj.tangents
    g = t.T @ t
    dg = np.einsum("kac,kb->cab", dtan, t) + np.einsum("ka,kbc->cab", t, dtan)
    return g, dg


def second_fundamental_coords(chart: SurfaceChart, u, cj: ChartJet | None = None):
    """Coordinate second fundamental form h_ab and the chart data."""
    if cj is None:
        cj = chart_jets(chart, u)
    gamma = chart.model.christoffels(cj.point)
    nabla = cj.hess + np.einsum("kij,ia,jb->kab", gamma, cj.jac, cj.jac)
    w_alg = np.einsum("kl,lab->kab", cj.ainv, nabla)
    normal = _gauss_from_tangents(cj.tangents, chart.orientation)
    h = np.einsum("kab,k->ab", w_alg, normal)
    return h, cj, normal


def mean_curvature(chart: SurfaceChart, u) -> float:
    """Frame-independent mean curvature H = tr(g^-1 h) / n."""
    h, cj, _ = second_fundamental_coords(chart, u)
    g = cj.tangents.T @ cj.tangents
    return float(np.trace(np.linalg.solve(g, h))) / chart.param_dim


# ---------------------------------------------------------------------------
# adapted frames


@dataclass(frozen=True, eq=False)
class AdaptedFrame:
    """Pointwise orthonormal frame adapted to the normal's V/Z split.

    ``ys`` holds rows Y_1 .. Y_{n+1}; rows 1..q-1 are horizontal, row q is
    the mixed vector x_q - z_q, rows q+1..n are central, the last row is
    the unit normal x_n1 + z_n1.  lam and mu are the proportionality
    factors x_n1 = lam * x_q and z_n1 = mu * z_q (zero when undefined).
    """

    q: int
    ys: np.ndarray
    x_q: np.ndarray
    z_q: np.ndarray
    x_n1: np.ndarray
    z_n1: np.ndarray
    lam: float
    mu: float
    special_heisenberg: bool = False

    @property
    def dim(self) -> int:
        return self.ys.shape[0]

    @property
    def normal(self) -> np.ndarray:
        return self.ys[-1]

    def x(self, k: int) -> np.ndarray:
        """Horizontal component vector X_k, 1 <= k <= q (one-based)."""
        if not 1 <= k <= self.q:
            raise IndexError("horizontal index out of range")
        return self.x_q if k == self.q else self.ys[k - 1]

    def z(self, k: int) -> np.ndarray:
        """Central component vector Z_k, q <= k <= n (one-based)."""
        if not self.q <= k <= self.dim - 1:
            raise IndexError("central index out of range")
        return self.z_q if k == self.q else self.ys[k - 1]

    def gram_residual(self) -> float:
        gram = self.ys @ self.ys.T
        return float(np.abs(gram - np.eye(self.dim)).max())


def _completion_candidates(indices, start: int):
    k = start % len(indices)
    return list(indices[k:]) + list(indices[:k])


def _gs_pick(dim: int, indices, fixed, start: int) -> np.ndarray:
    """First basis candidate with a nonzero rejection from ``fixed``.

    ``fixed`` must be orthonormal; the rejection is applied twice so that
    a candidate close to the fixed span still comes out orthogonal to
    working precision.
    """
    for idx in _completion_candidates(indices, start):
        v = np.zeros(dim)
        v[idx] = 1.0
        for _ in range(2):
            for f in fixed:
                v -= (v @ f) * f
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            return v / norm
    raise ValueError("Gram-Schmidt completion ran out of candidates")


def _gs_complete(dim: int, indices, fixed, count: int, start: int) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    fixed = list(fixed)
    for _ in range(count):
        v = _gs_pick(dim, indices, fixed, start)
        out.append(v)
        fixed.append(v)
    return out


def adapted_frame(
    alg: NilpotentAlgebra,
    normal,
    tol: float = 1e-10,
    completion_start: int = 0,
) -> AdaptedFrame:
    """Build the adapted orthonormal frame for a unit normal direction.

    ``completion_start`` rotates the Gram-Schmidt candidate order for the
    free frame directions; aggregate outputs of the Laplacian must not
    depend on it.
    """
    d = alg.dim_total
    q = alg.dim_v
    nrm = np.asarray(normal, dtype=float)
    if nrm.shape != (d,):
        raise ValueError("normal must have length dim_total")
    if abs(np.linalg.norm(nrm) - 1.0) > 1e-8:
        raise ValueError("normal must be a unit vector")

    xn = alg.v_part(nrm)
    zn = alg.z_part(nrm)
    s = float(np.linalg.norm(xn))
    c = float(np.linalg.norm(zn))
    v_indices = range(q)
    z_indices = range(q, d)

    if s > tol:
        u_dir = xn / s
    else:
        s = 0.0
        u_dir = _gs_pick(d, v_indices, [], completion_start)
    if c > tol:
        z_dir = zn / c
    else:
        c = 0.0
        z_dir = _gs_pick(d, z_indices, [], completion_start)

    x_q = c * u_dir
    z_q = s * z_dir
    x_n1 = s * u_dir
    z_n1 = c * z_dir
    lam = s / c if c > tol else 0.0
    mu = c / s if s > tol else 0.0
    y_q = x_q - z_q

    special = (
        alg.dim_center == 1
        and q % 2 == 0
        and q >= 2
        and is_heisenberg_type(alg, 1e-9)
    )
    if special:
        m = q // 2
        jz = alg.j_matrix(z_dir)
        x_m = -(jz @ u_dir)
        firsts: list[np.ndarray] = []
        fixed = [u_dir, x_m]
        for _ in range(m - 1):
            cand = _gs_pick(d, v_indices, fixed, completion_start)
            firsts.append(cand)
            fixed.extend([cand, jz @ cand])
        seconds = [jz @ v for v in firsts]
        rows = firsts + [x_m] + seconds + [y_q, nrm]
    else:
        v_comp = _gs_complete(d, v_indices, [u_dir], q - 1, completion_start)
        z_comp = _gs_complete(d, z_indices, [z_dir], d - 1 - q, completion_start)
        rows = v_comp + [y_q] + z_comp + [nrm]

    return AdaptedFrame(
        q=q,
        ys=np.array(rows),
        x_q=x_q,
        z_q=z_q,
        x_n1=x_n1,
        z_n1=z_n1,
        lam=lam,
        mu=mu,
        special_heisenberg=special,
    )


# ---------------------------------------------------------------------------
# shape data in an adapted frame


@dataclass(frozen=True, eq=False)
class ShapeData:
    """Second fundamental form b_ij in the adapted tangent frame."""

    b: np.ndarray
    h: float
    norm_b2: float


def chart_coefficients(cj: ChartJet, vec) -> np.ndarray:
    """Chart-direction coefficients of a tangent algebra vector."""
    sol, _, _, _ = np.linalg.lstsq(cj.tangents, np.asarray(vec, dtype=float), rcond=None)
    resid = np.linalg.norm(cj.tangents @ sol - vec)
    if resid > 1e-6:
        raise ValueError("vector is not tangent to the chart at this point")
    return sol


def shape_data(chart: SurfaceChart, u, frame: AdaptedFrame) -> ShapeData:
    """b_ij = <nabla_{Y_i} Y_j, normal> via ambient coordinate Christoffels.

    The frame vectors are expressed in chart-tangent coordinates by a
    pointwise linear solve; the second fundamental form is tensorial, so
    contracting those coefficients with the coordinate form of
    <nabla_{d_a r} d_b r, normal> is exactly the frame value.
    """
    h_coords, cj, normal = second_fundamental_coords(chart, u)
    if np.linalg.norm(frame.normal - normal) > 1e-8:
        raise ValueError("adapted frame normal does not match the chart normal")
    n = chart.param_dim
    vmat = np.empty((n, n))
    for i in range(n):
        vmat[:, i] = chart_coefficients(cj, frame.ys[i])
    b = vmat.T @ h_coords @ vmat
    h = float(np.trace(b)) / n
    return ShapeData(b=b, h=h, norm_b2=float((b * b).sum()))


def frame_directional_derivative(
    chart: SurfaceChart,
    u,
    scalar_field,
    y_vec,
    fd: FDParams = FDParams(),
) -> float:
    """Derivative of a scalar field on the chart along a tangent frame vector."""
    cj = chart_jets(chart, u)
    direction = chart_coefficients(cj, y_vec)
    out = directional_derivative(scalar_field, u, direction, fd, domain=chart.domain)
    return float(out)


def mean_curvature_derivatives(
    chart: SurfaceChart,
    u,
    frame: AdaptedFrame,
    fd: FDParams = FDParams(),
) -> np.ndarray:
    """Y_k(n H) for the n tangent frame vectors, by Richardson FD."""
    n = chart.param_dim
    field = lambda uu: n * mean_curvature(chart, uu)
    return np.array(
        [frame_directional_derivative(chart, u, field, frame.ys[k], fd) for k in range(n)]
    )


# ---------------------------------------------------------------------------
# chart catalog


def expression_chart(
    model: CoordinateModel,
    components,
    domain,
    orientation: int = 1,
) -> SurfaceChart:
    exprs = tuple(
        comp if isinstance(comp, Expr) else parse_expression(comp) for comp in components
    )
    return SurfaceChart(model=model, components=exprs, orientation=orientation, domain=tuple(domain))


def graph_chart(
    model: CoordinateModel,
    expr,
    domain,
    orientation: int = 1,
) -> SurfaceChart:
    """Hypersurface with the last coordinate a function of the others."""
    n = model.dim - 1
    comps = [f"u{i}" for i in range(1, n + 1)]
    comps.append(expr if isinstance(expr, str) else expr.source)
    return expression_chart(model, comps, domain, orientation)


def foliation_leaf_chart(
    z_level: float = 0.0,
    x_range=(-2.5, 2.5),
    y_range=(-1.0, 1.0),
) -> SurfaceChart:
    """Horizontal leaf {z = const} of the polarized 3-dimensional model.

    Its normal direction is (u1 * Y + Z)/sqrt(1 + u1^2) in the
    left-invariant frame, a minimal surface with non-constant |B|^2.
    """
    return expression_chart(
        nil_polarized_model(),
        ["u1", "u2", repr(float(z_level))],
        [x_range, y_range],
        orientation=1,
    )


def vertical_plane_chart(s_range=(-1.0, 1.0), t_range=(-1.0, 1.0)) -> SurfaceChart:
    """The plane r(s, t) = (s, 0, t) in the polarized model; Gauss map = Y."""
    return expression_chart(
        nil_polarized_model(),
        ["u1", "0", "u2"],
        [s_range, t_range],
        orientation=-1,
    )


def cylinder_chart(
    f1,
    f2,
    s_range=(-1.0, 1.0),
    t_range=(-1.0, 1.0),
    orientation: int = 1,
) -> SurfaceChart:
    """Surface r(s, t) = (f1(s), f2(s), t) in the polarized model.

    Invariant under central translations; the profile derivative must not
    vanish on the s-range.
    """
    e1 = f1 if isinstance(f1, Expr) else parse_expression(f1)
    e2 = f2 if isinstance(f2, Expr) else parse_expression(f2)
    for e in (e1, e2):
        if e.max_param > 1:
            raise ValueError("profile expressions may only use u1")
    lo, hi = float(s_range[0]), float(s_range[1])
    for sval in np.linspace(lo, hi, 17):
        j1 = e1.jet([sval, 0.0]).grad[0]
        j2 = e2.jet([sval, 0.0]).grad[0]
        if j1 * j1 + j2 * j2 <= 1e-16:
            raise ValueError(f"degenerate profile derivative at s={sval}")
    return expression_chart(
        nil_polarized_model(),
        [e1, e2, parse_expression("u2")],
        [(lo, hi), t_range],
        orientation=orientation,
    )


def random_graph_chart(
    model: CoordinateModel,
    rng: np.random.Generator,
    terms: int = 3,
    coeff_scale: float = 0.35,
    domain_half: float = 0.8,
) -> SurfaceChart:
    """Seeded random graph chart with bounded polynomial/trig height."""
    n = model.dim - 1
    parts = []
    for _ in range(max(1, terms)):
        kind = int(rng.integers(0, 4))
        a = int(rng.integers(1, n + 1))
        b = int(rng.integers(1, n + 1))
        coeff = float(np.round(rng.uniform(-coeff_scale, coeff_scale), 6))
        if kind == 0:
            parts.append(f"{coeff}*u{a}")
        elif kind == 1:
            parts.append(f"{coeff}*u{a}*u{b}")
        elif kind == 2:
            parts.append(f"{coeff}*sin(u{a})")
        else:
            parts.append(f"{coeff}*cos(u{a})")
    height = " + ".join(parts)
    domain = [(-domain_half, domain_half)] * n
    return graph_chart(model, height, domain)


CHART_CATALOG = {
    "nil_foliation_leaf": foliation_leaf_chart,
    "nil_vertical_plane": vertical_plane_chart,
    "nil_cylinder": cylinder_chart,
    "graph": graph_chart,
}
