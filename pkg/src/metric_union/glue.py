"""Gluing two Euclidean point sets along a bi-Lipschitz pairing.

Given finite samples U' in R^a and V' in R^b and a pairing f between a
subset A of U' and a subset B of V', identifying each A point with its
partner yields a quotient of the disjoint union.  Its shortest-path
metric has closed forms: within U' the Euclidean distance; across, the
best walk to a pairing point and onward; within V', the minimum of the
direct distance and a detour through two pairing points (the walk between
their partners happens on the U' side, where the pairing may have
contracted distances).

The pairing is renormalized at construction so that it never contracts
and stretches by at most its measured distortion ``d_f``: ``v_points`` is
stored rescaled by ``v_scale`` and every downstream statement about V'
refers to the stored (normalized) coordinates.  With that normalization
the U' side of the glued space stays exactly Euclidean, so running
``embed_union`` over it with identity coordinates on both sides produces
a pair of maps (f1 on U', f2 on V') into one space that agree through the
pairing and whose distortions are certified against ``9 * d_f + 2``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import CertificateViolation, InputError
from .linalg import PointCloud
from .metric import (_pairwise, build_partition, distortion_of,
                     validate_metric)
from .union_embed import UnionEmbedding, embed_union

__all__ = ["GlueInstance", "ExternalExtension", "glue_instance",
           "glued_metric", "external_extend"]

_BOUND_SLACK = 1e-6
_REL = 1e-9


def _readonly(a):
    a = np.array(a)  # private copy: never freeze a caller's array in place
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class GlueInstance:
    """Two point sets with a normalized pairing between subsets.

    ``pairing[k]`` is the ``v_points`` row matched with row ``a_idx[k]``
    of ``u_points``; as a set it equals ``b_idx``.  ``v_points`` already
    carries the normalizing rescale: the pairing measured on the stored
    coordinates never contracts and stretches by at most ``d_f``.
    ``v_scale`` is the factor that was applied to the caller's raw
    coordinates (divide stored V' distances by it to recover raw ones).
    """

    u_points: PointCloud
    v_points: PointCloud
    a_idx: np.ndarray
    b_idx: np.ndarray
    pairing: np.ndarray
    d_f: float
    v_scale: float

    @property
    def n_pairs(self):
        return self.a_idx.size


@dataclass(frozen=True)
class ExternalExtension:
    """Common-target extension pair produced from a glue instance.

    ``f1`` maps the U' rows and ``f2`` the (normalized) V' rows into one
    space of dimension at most a + b + 1; paired rows share bitwise-equal
    images.  Distortions are measured against the Euclidean geometry of
    each side; ``bound`` is the certified ceiling 9 * d_f + 2.
    """

    f1: PointCloud
    f2: PointCloud
    distortion_f1: float
    distortion_f2: float
    d_f: float
    bound: float
    embedding: UnionEmbedding

    def as_dict(self):
        return {
            "distortion_f1": self.distortion_f1,
            "distortion_f2": self.distortion_f2,
            "d_f": self.d_f,
            "bound": self.bound,
        }


def _as_points(cloud, name):
    pts = np.asarray(getattr(cloud, "points", cloud), dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise InputError(f"{name} must be a nonempty 2-d point array")
    return pts


def _index_array(idx, n, name):
    arr = np.asarray(idx, dtype=np.intp).ravel()
    if arr.size == 0:
        raise InputError(f"{name} must be nonempty")
    if arr.min() < 0 or arr.max() >= n:
        raise InputError(f"{name} has entries outside [0, {n})")
    if np.unique(arr).size != arr.size:
        raise InputError(f"{name} has repeated entries")
    return arr


def glue_instance(u_points, v_points, a_idx, b_idx, pairing) -> GlueInstance:
    """Validate a pairing, measure its distortion, and normalize it.

    The raw pairing may contract some pairs and stretch others; its
    distortion ``d_f`` (stretch factor times contraction factor) is
    measured over all matched pairs.  Rescaling ``v_points`` by the
    contraction factor turns it into a non-contracting map with Lipschitz
    constant exactly ``d_f``, the form every glued-space statement
    assumes.  A single matched pair measures as an isometry.
    """
    U = _as_points(u_points, "u_points")
    V = _as_points(v_points, "v_points")
    a_idx = _index_array(a_idx, U.shape[0], "a_idx")
    b_idx = _index_array(b_idx, V.shape[0], "b_idx")
    pair = _index_array(pairing, V.shape[0], "pairing")
    if not (a_idx.size == b_idx.size == pair.size):
        raise InputError("a_idx, b_idx and pairing must have equal length")
    if not np.array_equal(np.sort(pair), np.sort(b_idx)):
        raise InputError("pairing must be a bijection onto b_idx")

    if a_idx.size >= 2:
        du = _pairwise(U[a_idx])
        dv = _pairwise(V[pair])
        iu, jv = np.triu_indices(a_idx.size, k=1)
        du, dv = du[iu, jv], dv[iu, jv]
        if (du <= 0.0).any() or (dv <= 0.0).any():
            raise InputError("matched points must be pairwise distinct "
                             "on both sides")
        lip = float((dv / du).max())
        contraction = float((du / dv).max())
    else:
        lip = contraction = 1.0
    d_f = lip * contraction
    v_scale = contraction

    return GlueInstance(
        u_points=PointCloud(U),
        v_points=PointCloud(V * v_scale),
        a_idx=_readonly(a_idx),
        b_idx=_readonly(b_idx),
        pairing=_readonly(pair),
        d_f=d_f,
        v_scale=v_scale,
    )


def _glue_parts(G: GlueInstance):
    """Distance blocks of the quotient plus the V'-row placement maps."""
    U = G.u_points.points
    V = G.v_points.points
    nu = U.shape[0]
    uu = _pairwise(U)
    vv_direct = _pairwise(V)
    ua = uu[:, G.a_idx]                 # (nu, m) walk to a pairing point
    bp = vv_direct[:, G.pairing]        # (nv, m) walk to a partner image
    aa = uu[np.ix_(G.a_idx, G.a_idx)]   # (m, m) walk between pairing points

    cross = (ua[:, None, :] + bp[None, :, :]).min(axis=2)
    half = (bp[:, :, None] + aa[None, :, :]).min(axis=1)
    routed = (half[:, None, :] + bp[None, :, :]).min(axis=2)
    # the detour cost is symmetric, but its two summation orders round
    # differently; take the elementwise min so the matrix is exact
    routed = np.minimum(routed, routed.T)
    vv = np.minimum(vv_direct, routed)

    keep_v = np.setdiff1d(np.arange(V.shape[0]), G.pairing)
    v_global = np.empty(V.shape[0], dtype=np.intp)
    v_global[G.pairing] = G.a_idx       # merged rows live at their partner
    v_global[keep_v] = nu + np.arange(keep_v.size)
    return uu, vv, cross, keep_v, v_global


def _build_glued(G: GlueInstance):
    U = G.u_points.points
    nu = U.shape[0]
    uu, vv, cross, keep_v, v_global = _glue_parts(G)

    n = nu + keep_v.size
    D = np.zeros((n, n))
    D[:nu, :nu] = uu
    D[:nu, nu:] = cross[:, keep_v]
    D[nu:, :nu] = cross[:, keep_v].T
    D[nu:, nu:] = vv[np.ix_(keep_v, keep_v)]
    labels = tuple(("u", int(i)) for i in range(nu)) \
        + tuple(("v", int(j)) for j in keep_v)
    X = validate_metric(D, labels=labels)
    idx_b = np.concatenate([G.a_idx, nu + np.arange(keep_v.size)])
    P = build_partition(X, np.arange(nu), idx_b)
    return X, P, keep_v, v_global


def glued_metric(G: GlueInstance):
    """Shortest-path metric of the quotient, with its two-sided partition.

    Matched pairs are merged into single points (kept at their U' index),
    so the space has ``len(u_points) + len(v_points) - n_pairs`` points.
    Side A of the partition holds every U' point, side B the merged
    points plus the unmatched V' points.  The result passes the full
    metric validation; a failure propagates and signals a bug or
    degenerate (duplicate-point) input.
    """
    X, P, _, _ = _build_glued(G)
    return X, P


def _certify(name, witness, measured, bound):
    if measured > bound:
        raise CertificateViolation(name, witness, measured, bound)


def external_extend(G: GlueInstance, tol: float = 1e-7) -> ExternalExtension:
    """Extend the pairing to all of U' and V' through one embedding.

    Runs ``embed_union`` on the glued space with identity coordinates on
    both sides (the U' side of the quotient is exactly Euclidean; the
    normalized V' side is non-contracting with stretch at most ``d_f``)
    and restricts the result to each side.  Certifies compatibility
    (paired rows agree bitwise), non-contraction of ``f2`` on V', and the
    distortion ceiling ``9 * d_f + 2`` before returning.
    """
    X, P, keep_v, v_global = _build_glued(G)
    V = G.v_points.points
    phi_a = G.u_points
    # P.idx_b is canonically sorted: merged globals (= a_idx values)
    # ascending, then the unmatched block; order phi_b rows to match
    merged_order = np.argsort(G.a_idx)
    phi_b = PointCloud(np.vstack([V[G.pairing[merged_order]], V[keep_v]]))
    emb = embed_union(X, P, phi_a, phi_b, tol=tol)

    nu = G.u_points.m
    f1 = PointCloud(emb.full.points[:nu].copy())
    f2 = PointCloud(emb.full.points[v_global].copy())

    if not np.array_equal(f1.points[G.a_idx], f2.points[G.pairing]):
        gap = np.abs(f1.points[G.a_idx] - f2.points[G.pairing]).max()
        raise CertificateViolation("glue.compatibility", None, gap, 0.0)

    rep1 = distortion_of(X, f1.points, subset=P.idx_a)
    bound = 9.0 * G.d_f + 2.0
    _certify("glue.extension_bound_f1", rep1.expansion_pair,
             rep1.distortion, bound + _BOUND_SLACK)

    d2 = 1.0
    witness2 = None
    if V.shape[0] >= 2:
        dv = _pairwise(V)
        dimg = _pairwise(f2.points)
        iu, jv = np.triu_indices(V.shape[0], k=1)
        ratios = dimg[iu, jv] / dv[iu, jv]
        k = int(np.argmin(ratios))
        _certify("glue.f2_noncontracting",
                 (int(iu[k]), int(jv[k])), 1.0 - float(ratios[k]), _REL)
        k = int(np.argmax(ratios))
        witness2 = (int(iu[k]), int(jv[k]))
        d2 = float(ratios[k]) * max(float(1.0 / ratios.min()), 1.0)
    _certify("glue.extension_bound_f2", witness2, d2, bound + _BOUND_SLACK)

    return ExternalExtension(
        f1=f1,
        f2=f2,
        distortion_f1=float(rep1.distortion),
        distortion_f2=float(d2),
        d_f=G.d_f,
        bound=bound,
        embedding=emb,
    )
