"""Composite embedding of a two-sided metric space into one Euclidean space.

Given per-side coordinates phi_A, phi_B (non-contracting with Lipschitz
constants d_a, d_b), ``build_psi`` produces a map of the whole space into
the B-side coordinate space: cover points of side A go to the phi_B image
of their nearest B point, the rest of side A is placed by Lipschitz
extension in coordinates, and side B keeps phi_B verbatim.  ``embed_union``
runs this twice (once per side), appends one real coordinate
psi_Delta(x) = +/- gamma * R_x, and direct-sums the three parts into a
non-contracting embedding with expansion at most 7*d_a*d_b + 2*(d_a + d_b)
at alpha = 1/2, and below 8.93 for isometric sides at alpha = 0.3114.

Every inequality the analysis relies on is re-measured on the produced
coordinates and recorded as a named AuditEntry; any failing entry raises
AuditViolation carrying the full entry list.  Audit reductions may be
spread over threads (METRIC_UNION_THREADS) without changing results.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cover import CoverResult, build_cover, f_lip_bound
from .errors import AuditViolation, InputDistortionError, InputError
from .kirszbraun import PartialMap, extend_sequential
from .linalg import PointCloud, direct_sum
from .metric import (DistortionReport, FiniteMetricSpace, UnionPartition,
                     distortion_of)

__all__ = [
    "EmbedParams", "AuditEntry", "PsiResult", "UnionEmbedding",
    "select_alpha", "headline_bound", "build_psi", "embed_union",
]

_ISO_ALPHA = 0.3114
_GEN_ALPHA = 0.5
_ISO_BOUND = 8.93
_AUDIT_REL = 1e-6   # relative slack at which an audit entry counts as failed
_EQ_TOL = 1e-12     # equality tolerance for parameter comparisons


def select_alpha(d_a: float, d_b: float) -> float:
    """Default cover parameter: 0.3114 for isometric sides, else 1/2."""
    if d_a < 1.0 - _EQ_TOL or d_b < 1.0 - _EQ_TOL:
        raise InputError(f"side constants must be >= 1, got {d_a}, {d_b}")
    if abs(d_a - 1.0) <= _EQ_TOL and abs(d_b - 1.0) <= _EQ_TOL:
        return _ISO_ALPHA
    return _GEN_ALPHA


@dataclass(frozen=True)
class EmbedParams:
    """Construction constants.  ``derive`` ties beta and gamma to the rest;
    the raw constructor leaves them free (useful only for fault injection).
    """

    alpha: float
    d_a: float
    d_b: float
    beta: float
    gamma: float
    tol: float = 1e-7

    @staticmethod
    def derive(alpha, d_a, d_b, tol=1e-7):
        if not (0.0 < alpha <= 1.0):
            raise InputError(f"alpha must lie in (0, 1], got {alpha!r}")
        if d_a < 1.0 or d_b < 1.0:
            raise InputError(
                f"side constants must be >= 1, got {d_a!r}, {d_b!r}")
        beta = (1.0 + alpha) * (2.0 * d_a * d_b + 1.0)
        return EmbedParams(alpha=float(alpha), d_a=float(d_a),
                           d_b=float(d_b), beta=beta,
                           gamma=math.sqrt(0.5) * beta, tol=float(tol))

    def swapped(self):
        """Same constants with the roles of the two sides exchanged."""
        return EmbedParams(alpha=self.alpha, d_a=self.d_b, d_b=self.d_a,
                           beta=self.beta, gamma=self.gamma, tol=self.tol)


@dataclass(frozen=True)
class AuditEntry:
    """One measured inequality.

    sense "upper" asserts measured <= bound, "lower" asserts
    measured >= bound; ``witness`` is the extremal point pair (space
    indices) or None for aggregate/arithmetic checks.
    """

    name: str
    sense: str
    measured: float
    bound: float
    witness: tuple | None

    @property
    def slack(self):
        s = self.bound - self.measured
        return s if self.sense == "upper" else -s

    def ok(self, rel=_AUDIT_REL):
        return self.slack >= -rel * max(abs(self.bound), 1.0)

    def as_dict(self):
        return {
            "name": self.name,
            "sense": self.sense,
            "measured": self.measured,
            "bound": self.bound,
            "slack": self.slack,
            "witness": list(self.witness) if self.witness else None,
            "ok": bool(self.ok()),
        }


@dataclass(frozen=True)
class PsiResult:
    """One-sided map over all points, its cover, and its audit entries."""

    cloud: PointCloud
    cover: CoverResult
    gmap: PartialMap
    entries: list


@dataclass(frozen=True)
class UnionEmbedding:
    """Full embedding with components, distortion report, and audit."""

    psi_a: PointCloud
    psi_b: PointCloud
    psi_delta: PointCloud
    full: PointCloud
    report: DistortionReport
    audit: list
    params: EmbedParams
    scale_a: float
    scale_b: float

    def as_dict(self):
        return {
            "dim": self.full.dim,
            "points": self.full.points.tolist(),
            "report": self.report.as_dict(),
            "audit": [e.as_dict() for e in self.audit],
            "params": {
                "alpha": self.params.alpha, "d_a": self.params.d_a,
                "d_b": self.params.d_b, "beta": self.params.beta,
                "gamma": self.params.gamma, "tol": self.params.tol,
            },
            "scale_a": self.scale_a,
            "scale_b": self.scale_b,
        }


def _thread_count():
    raw = os.environ.get("METRIC_UNION_THREADS", "1")
    try:
        k = int(raw)
    except ValueError:
        raise InputError(f"METRIC_UNION_THREADS must be an integer, "
                         f"got {raw!r}") from None
    return max(1, k)


def _dist_rows(pts, lo, hi):
    diff = pts[lo:hi, None, :] - pts[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def _image_distances(pts):
    """Pairwise distances, row blocks optionally spread over threads.

    Each entry is computed by the same expression either way, so the
    result is bit-identical regardless of the thread count.
    """
    n = pts.shape[0]
    k = min(_thread_count(), n)
    if k <= 1 or n < 64:
        return _dist_rows(pts, 0, n)
    edges = np.linspace(0, n, k + 1, dtype=int)
    with ThreadPoolExecutor(max_workers=k) as pool:
        blocks = list(pool.map(
            lambda t: _dist_rows(pts, t[0], t[1]),
            zip(edges[:-1], edges[1:])))
    return np.vstack(blocks)


def _as_cloud(obj):
    return obj if isinstance(obj, PointCloud) else PointCloud(np.asarray(obj))


def _check_side(X, idx, cloud, side, lip, rel=_AUDIT_REL):
    """Verify a side embedding is non-contracting with Lipschitz <= lip."""
    rep = distortion_of(X, cloud, subset=idx)
    if rep.contraction > 1.0 + rel:
        raise InputDistortionError(side, rep.contraction, 1.0,
                                   witness=rep.contraction_pair)
    if rep.expansion > lip * (1.0 + rel):
        raise InputDistortionError(side, rep.expansion, lip,
                                   witness=rep.expansion_pair)
    return rep


def _normalize_side(X, idx, cloud, side):
    """Rescale a slightly contracting side embedding to non-contracting
    form and measure its Lipschitz constant.  Returns (cloud, lip, scale).
    """
    rep = distortion_of(X, cloud, subset=idx)
    scale = 1.0
    if rep.contraction > 1.0:
        scale = rep.contraction
        cloud = cloud.scaled(scale)
        rep = distortion_of(X, cloud, subset=idx)
    return cloud, max(rep.expansion, 1.0), scale


def _extreme(vals, pairs, sense):
    """(measured, witness) of the max ("upper") or min ("lower") entry."""
    if vals.size == 0:
        return None, None
    k = int(np.argmax(vals)) if sense == "upper" else int(np.argmin(vals))
    return float(vals[k]), (int(pairs[0][k]), int(pairs[1][k]))


def _same_side_pairs(idx):
    iu, ju = np.triu_indices(idx.size, k=1)
    return idx[iu], idx[ju]


def _cross_pairs(ia, ib):
    gi, gj = np.meshgrid(ia, ib, indexing="ij")
    keep = gi.ravel() != gj.ravel()   # overlap points pair with themselves
    return gi.ravel()[keep], gj.ravel()[keep]


class _Collector:
    def __init__(self):
        self.entries = []

    def add(self, name, sense, vals, pairs, bound):
        measured, witness = _extreme(np.asarray(vals, dtype=np.float64),
                                     pairs, sense)
        if measured is None:
            return
        self.entries.append(AuditEntry(name=name, sense=sense,
                                       measured=measured, bound=float(bound),
                                       witness=witness))

    def scalar(self, name, sense, measured, bound, witness=None):
        self.entries.append(AuditEntry(name=name, sense=sense,
                                       measured=float(measured),
                                       bound=float(bound), witness=witness))


def _raise_if_failing(entries):
    bad = [e for e in entries if not e.ok()]
    if bad:
        # surface a witnessed pairwise failure when one exists
        e = next((x for x in bad if x.witness is not None), bad[0])
        raise AuditViolation(e.name, e.witness, e.measured, e.bound,
                             entries=entries)


def build_psi(X: FiniteMetricSpace, P: UnionPartition, phi_a, phi_b,
              params: EmbedParams, name: str = "psi") -> PsiResult:
    """Map all points into the B-side coordinate space.

    Side B keeps phi_b verbatim; cover points of side A take the phi_b
    image of their nearest B point; remaining A points are placed by
    sequential Lipschitz extension of that partial map.  Overlap points
    are consistent by construction (their nearest point is themselves).

    Audited guarantees, with lf = 2(1 + 1/alpha):
      {name}.away_upper   A-pair image ratio   <= lf * d_a * d_b
      {name}.home_lower   B-pair image ratio   >= 1
      {name}.home_upper   B-pair image ratio   <= d_b
      {name}.cross_upper  cross image ratio    <= 2(1+alpha) d_a d_b + (2+alpha) d_b
      {name}.cross_lower  (|psi(a)-psi(b)| - d + beta*R_a)/d >= 0
      {name}.g_lip        partial-map constant <= lf * d_b
    """
    phi_a, phi_b = _as_cloud(phi_a), _as_cloud(phi_b)
    ia, ib = P.idx_a, P.idx_b
    if phi_a.m != ia.size:
        raise InputError(f"phi_a has {phi_a.m} rows for {ia.size} A-points")
    if phi_b.m != ib.size:
        raise InputError(f"phi_b has {phi_b.m} rows for {ib.size} B-points")
    _check_side(X, ia, phi_a, "A", params.d_a)
    _check_side(X, ib, phi_b, "B", params.d_b)

    C = build_cover(X, P, params.alpha)
    row_a = {int(s): k for k, s in enumerate(ia)}
    row_b = {int(s): k for k, s in enumerate(ib)}

    sources = phi_a.take([row_a[int(c)] for c in C.cover_idx])
    targets = phi_b.take([row_b[int(t)] for t in C.nearest])
    gmap = PartialMap(sources=sources, targets=targets)

    rest = np.setdiff1d(ia, C.cover_idx)
    placed = extend_sequential(
        gmap, phi_a.take([row_a[int(s)] for s in rest]), params.tol)

    psi = np.zeros((X.n, phi_b.dim))
    psi[C.cover_idx] = targets.points
    if rest.size:
        psi[rest] = placed.points
    psi[ib] = phi_b.points   # home side last: psi restricted to B is phi_b

    audit = _Collector()
    Dimg = _image_distances(psi)
    Dx = X.dist
    lf = f_lip_bound(params.alpha)

    pa = _same_side_pairs(ia)
    audit.add(f"{name}.away_upper", "upper",
              Dimg[pa] / Dx[pa], pa, lf * params.d_a * params.d_b)
    pb = _same_side_pairs(ib)
    audit.add(f"{name}.home_lower", "lower", Dimg[pb] / Dx[pb], pb, 1.0)
    audit.add(f"{name}.home_upper", "upper", Dimg[pb] / Dx[pb], pb,
              params.d_b)
    px = _cross_pairs(ia, ib)
    xi_home = (2.0 * (1.0 + params.alpha) * params.d_a * params.d_b
               + (2.0 + params.alpha) * params.d_b)
    audit.add(f"{name}.cross_upper", "upper", Dimg[px] / Dx[px], px, xi_home)
    r_of = np.zeros(X.n)
    r_of[ia] = P.r_a
    margin = (Dimg[px] - Dx[px] + params.beta * r_of[px[0]]) / Dx[px]
    audit.add(f"{name}.cross_lower", "lower", margin, px, 0.0)
    audit.scalar(f"{name}.g_lip", "upper", gmap.lip, lf * params.d_b)

    _raise_if_failing(audit.entries)
    return PsiResult(cloud=PointCloud(psi), cover=C, gmap=gmap,
                     entries=audit.entries)


def headline_bound(params: EmbedParams) -> float:
    """Expansion bound to hold the final map against.

    7 d_a d_b + 2(d_a + d_b) at alpha = 1/2; 8.93 for isometric sides at
    alpha = 0.3114; otherwise the root of the worst per-pair-type squared
    bound (valid for any alpha, but with no closed form).
    """
    if abs(params.alpha - _GEN_ALPHA) <= _EQ_TOL:
        return (7.0 * params.d_a * params.d_b
                + 2.0 * (params.d_a + params.d_b))
    iso = abs(params.d_a - 1.0) <= _EQ_TOL and abs(params.d_b - 1.0) <= _EQ_TOL
    if iso and abs(params.alpha - _ISO_ALPHA) <= _EQ_TOL:
        return _ISO_BOUND
    return math.sqrt(max(_sq_bounds(params)))


def _sq_bounds(params):
    """Per-pair-type squared expansion bounds (A-pairs, B-pairs, cross)."""
    lf = f_lip_bound(params.alpha)
    g2 = params.gamma ** 2
    common = lf ** 2 * params.d_a ** 2 * params.d_b ** 2
    xi_a = (2.0 * (1.0 + params.alpha) * params.d_a * params.d_b
            + (2.0 + params.alpha) * params.d_a)
    xi_b = (2.0 * (1.0 + params.alpha) * params.d_a * params.d_b
            + (2.0 + params.alpha) * params.d_b)
    return (params.d_a ** 2 + common + g2,
            params.d_b ** 2 + common + g2,
            xi_a ** 2 + xi_b ** 2 + 4.0 * g2)


def _claim_case_bound_sq(d, ra, rb, beta):
    """Per-pair lower bound on the squared full-image distance.

    Three cases on how d compares with beta * min(R) and beta * max(R);
    each case value is both below the measured squared distance and at
    least d**2.
    """
    r1 = np.minimum(ra, rb)
    r2 = np.maximum(ra, rb)
    delta_sq = beta ** 2 * (r1 + r2) ** 2 / 2.0
    both = (d - beta * r1) ** 2 + (d - beta * r2) ** 2 + delta_sq
    near = (d - beta * r1) ** 2 + delta_sq
    return np.select(
        [beta * r2 <= d, beta * r1 <= d],
        [both, near],
        default=delta_sq)


def _full_audit(X, P, params, phi_a, phi_b, full_pts, psi_delta):
    ia, ib = P.idx_a, P.idx_b
    audit = _Collector()
    Dimg = _image_distances(full_pts)
    Dx = X.dist
    sq_a, sq_b, sq_x = _sq_bounds(params)

    pa = _same_side_pairs(ia)
    pb = _same_side_pairs(ib)
    px = _cross_pairs(ia, ib)
    audit.add("full.side_a_sq", "upper", (Dimg[pa] / Dx[pa]) ** 2, pa, sq_a)
    audit.add("full.side_b_sq", "upper", (Dimg[pb] / Dx[pb]) ** 2, pb, sq_b)
    audit.add("full.cross_sq", "upper", (Dimg[px] / Dx[px]) ** 2, px, sq_x)

    iu, ju = np.triu_indices(X.n, k=1)
    ratio = Dimg[iu, ju] / Dx[iu, ju]
    audit.add("full.noncontract", "lower", ratio, (iu, ju), 1.0)
    head = headline_bound(params)
    audit.add("full.expansion", "upper", ratio, (iu, ju), head)
    audit.scalar("full.headline_consistent", "upper",
                 math.sqrt(max(sq_a, sq_b, sq_x)), head)

    # the direct sum can only add to the per-side coordinate distances
    ta = np.triu_indices(ia.size, k=1)
    da_img = _image_distances(phi_a.points)
    audit.add("full.dominates_phi_a", "lower",
              Dimg[np.ix_(ia, ia)][ta] / da_img[ta], pa, 1.0)
    tb = np.triu_indices(ib.size, k=1)
    db_img = _image_distances(phi_b.points)
    audit.add("full.dominates_phi_b", "lower",
              Dimg[np.ix_(ib, ib)][tb] / db_img[tb], pb, 1.0)

    # one-coordinate part: Lipschitz gamma on each side, and across sides
    # exactly gamma_hat * (R_a + R_b) where gamma_hat re-derives gamma
    dd = psi_delta.points[:, 0]
    audit.add("full.delta_lip_a", "upper",
              np.abs(dd[pa[0]] - dd[pa[1]]) / Dx[pa], pa, params.gamma)
    audit.add("full.delta_lip_b", "upper",
              np.abs(dd[pb[0]] - dd[pb[1]]) / Dx[pb], pb, params.gamma)
    gamma_hat = math.sqrt(0.5) * (1.0 + params.alpha) * (
        2.0 * params.d_a * params.d_b + 1.0)
    r_of_a = np.zeros(X.n)
    r_of_a[ia] = P.r_a
    r_of_b = np.zeros(X.n)
    r_of_b[ib] = P.r_b
    expect = gamma_hat * (r_of_a[px[0]] + r_of_b[px[1]])
    got = np.abs(dd[px[0]] - dd[px[1]])
    dev = np.abs(got - expect) / np.maximum(expect, 1e-300)
    audit.add("full.delta_cross_exact", "upper", dev, px, 0.0)

    # case analysis behind non-contraction, re-evaluated per cross pair
    case_sq = _claim_case_bound_sq(Dx[px], r_of_a[px[0]], r_of_b[px[1]],
                                   params.beta)
    audit.add("full.claim_case_bound", "lower",
              (Dimg[px] ** 2 - case_sq) / Dx[px] ** 2, px, 0.0)
    audit.add("full.claim_dominates", "lower", case_sq / Dx[px] ** 2, px, 1.0)
    return audit.entries


def embed_union(X: FiniteMetricSpace, P: UnionPartition, phi_a, phi_b,
                params: EmbedParams | None = None,
                tol: float = 1e-7) -> UnionEmbedding:
    """Non-contracting embedding of the whole space, fully audited.

    Side inputs are rescaled to non-contracting form if they contract
    slightly (the factor is recorded), and their Lipschitz constants are
    measured rather than trusted.  When ``params`` is None, alpha comes
    from select_alpha and the remaining constants from EmbedParams.derive.
    """
    phi_a, phi_b = _as_cloud(phi_a), _as_cloud(phi_b)
    phi_a, d_a, scale_a = _normalize_side(X, P.idx_a, phi_a, "A")
    phi_b, d_b, scale_b = _normalize_side(X, P.idx_b, phi_b, "B")
    if params is None:
        params = EmbedParams.derive(select_alpha(d_a, d_b), d_a, d_b, tol)
    else:
        _check_side(X, P.idx_a, phi_a, "A", params.d_a)
        _check_side(X, P.idx_b, phi_b, "B", params.d_b)

    res_b = build_psi(X, P, phi_a, phi_b, params, name="psi_b")
    res_a = build_psi(X, P.swapped(), phi_b, phi_a, params.swapped(),
                      name="psi_a")

    delta = np.zeros((X.n, 1))
    delta[P.idx_a, 0] = params.gamma * P.r_a
    delta[P.idx_b, 0] = -(params.gamma * P.r_b)
    delta += 0.0   # normalize -0.0 on overlap points
    psi_delta = PointCloud(delta)

    full = direct_sum([res_a.cloud, res_b.cloud, psi_delta])
    report = distortion_of(X, full)
    audit = (res_a.entries + res_b.entries
             + _full_audit(X, P, params, phi_a, phi_b, full.points,
                           psi_delta))
    _raise_if_failing(audit)
    return UnionEmbedding(psi_a=res_a.cloud, psi_b=res_b.cloud,
                          psi_delta=psi_delta, full=full, report=report,
                          audit=audit, params=params,
                          scale_a=scale_a, scale_b=scale_b)
