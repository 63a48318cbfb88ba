"""Command-line interface: JSON in, certified JSON reports out.

Subcommands: check-metric, embed, cover, lowerbound, glue, selftest.
Reports go to --output when given, else stdout; timing goes to stderr so
stdout stays byte-deterministic (floats are formatted with 17 significant
digits and keys are sorted).  All randomness derives from --seed.

Exit codes: 0 success, 1 malformed input, 2 a certified property failed
during the run (for audit failures the report is still written).
"""

import argparse
import sys
import time

from .cover import build_cover, certify_f_lipschitz, verify_cover
from .errors import (AuditViolation, CollapsedPairError, CoverageError,
                     EmptySideError, InconsistentDuplicate,
                     InputDistortionError, InputError, LengthMismatchError,
                     MetricUnionError, MetricValidationError, NotEuclidean)
from .jsonio import (canonical_dumps, load_json, parse_cloud, parse_glue,
                     parse_partition, parse_space, to_jsonable)
from .glue import external_extend, glued_metric
from .linalg import mds_best_effort, mds_isometric_embed
from .lower_bound import (build_123_metric, certified_lower_bound,
                          choose_n_for_epsilon, ratio_check, sample_split)
from .metric import distortion_of, validate_metric
from .union_embed import EmbedParams, embed_union

__all__ = ["main"]

# errors blamed on what the user handed us, not on the computation
_INPUT_ERRORS = (InputError, MetricValidationError, CoverageError,
                 EmptySideError, CollapsedPairError, NotEuclidean,
                 LengthMismatchError, InconsistentDuplicate,
                 InputDistortionError)


class _UsageError(InputError):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so usage errors map to 1."""

    def error(self, message):
        raise _UsageError(message)


def _error_payload(exc):
    data = {"error": type(exc).__name__, "message": str(exc)}
    witness = {}
    for key, val in vars(exc).items():
        if key == "entries":
            continue
        if key == "violations":
            witness["violations"] = [str(v) for v in val[:20]]
            continue
        try:
            witness[key] = to_jsonable(val)
        except MetricUnionError:
            witness[key] = repr(val)
    if witness:
        data["witness"] = witness
    return data


def _write_report(obj, output):
    text = canonical_dumps(obj)
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _side_space(X, idx):
    return validate_metric(X.sub(idx))


def cmd_check_metric(args):
    X = parse_space(load_json(args.input))
    return {"ok": True, "n": X.n, "labels": list(X.labels)}


def _load_space_partition(obj):
    if not isinstance(obj, dict):
        raise InputError("input must be a JSON object")
    if "space" not in obj or "partition" not in obj:
        raise InputError("input needs 'space' and 'partition' fields")
    X = parse_space(obj["space"])
    P = parse_partition(obj["partition"], X)
    return X, P


def cmd_embed(args):
    obj = load_json(args.input)
    X, P = _load_space_partition(obj)
    phi_a = parse_cloud(obj["phi_a"], "phi_a") if "phi_a" in obj \
        else mds_isometric_embed(_side_space(X, P.idx_a))
    phi_b = parse_cloud(obj["phi_b"], "phi_b") if "phi_b" in obj \
        else mds_isometric_embed(_side_space(X, P.idx_b))
    alpha = args.alpha if args.alpha is not None else obj.get("alpha")

    params = None
    if alpha is not None:
        d_a = max(1.0, distortion_of(X, phi_a, subset=P.idx_a).distortion)
        d_b = max(1.0, distortion_of(X, phi_b, subset=P.idx_b).distortion)
        params = EmbedParams.derive(float(alpha), d_a, d_b, args.tol)

    emb = embed_union(X, P, phi_a, phi_b, params=params, tol=args.tol)
    full = emb.as_dict()
    return {
        "embedding": {"dim": full["dim"], "points": full["points"]},
        "report": full["report"],
        "audit": full["audit"],
        "params": full["params"],
        "scale_a": full["scale_a"],
        "scale_b": full["scale_b"],
    }


def cmd_cover(args):
    obj = load_json(args.input)
    X, P = _load_space_partition(obj)
    alpha = args.alpha if args.alpha is not None else obj.get("alpha", 0.5)
    C = build_cover(X, P, float(alpha))
    verify_cover(X, P, C)
    certify_f_lipschitz(X, P, C)
    return {
        "alpha": C.alpha,
        "cover_idx": C.cover_idx,
        "nearest": C.nearest,
        "lip_f": C.lip_f,
        "lip_bound": C.lip_bound,
        "cover_size": int(C.cover_idx.size),
    }


def cmd_lowerbound(args):
    report = {"seed": args.seed}
    if args.epsilon is not None:
        n, median_delta = choose_n_for_epsilon(args.epsilon, args.seed)
        report["epsilon"] = args.epsilon
        report["median_delta"] = median_delta
    elif args.n is not None:
        n = args.n
    else:
        raise InputError("lowerbound needs --n or --epsilon")

    split = sample_split(n, args.seed)
    bound = certified_lower_bound(split)
    X, _ = build_123_metric(split)
    images = mds_best_effort(X)
    measured = distortion_of(X, images).distortion
    r1, r2 = ratio_check(split, images)
    lo, hi = (1.0 + split.delta_star) ** -2, (1.0 + split.delta_star) ** 2

    report.update({
        "n": split.n,
        "attempts": split.attempts,
        "edges_e1": int(split.e1.shape[0]),
        "edges_e2": int(split.e2.shape[0]),
        "delta_star": split.delta_star,
        "certified_bound": bound,
        "audits": [
            {"name": "mds_distortion_above_bound", "sense": "lower",
             "measured": measured, "bound": bound,
             "ok": bool(measured >= bound - 1e-9)},
            {"name": "energy_ratio_e1_in_window", "sense": "range",
             "measured": r1, "lo": lo, "hi": hi,
             "ok": bool(lo - 1e-9 <= r1 <= hi + 1e-9)},
            {"name": "energy_ratio_e2_in_window", "sense": "range",
             "measured": r2, "lo": lo, "hi": hi,
             "ok": bool(lo - 1e-9 <= r2 <= hi + 1e-9)},
        ],
    })
    return report


def cmd_glue(args):
    G = parse_glue(load_json(args.input))
    X, _ = glued_metric(G)
    ext = external_extend(G, tol=args.tol)
    return {
        "glued": {
            "n": X.n,
            "n_u": G.u_points.m,
            "n_v": G.v_points.m,
            "n_pairs": int(G.n_pairs),
            "d_f": G.d_f,
            "v_scale": G.v_scale,
        },
        "f1": {"dim": ext.f1.dim, "points": ext.f1.points},
        "f2": {"dim": ext.f2.dim, "points": ext.f2.points},
        "distortions": ext.as_dict(),
        "audit": [e.as_dict() for e in ext.embedding.audit],
    }


def cmd_selftest(args):
    from .acceptance import run_selftest
    results, ok = run_selftest(seed=args.seed, out=sys.stdout)
    if args.output:
        payload = {"ok": ok, "results": [r.as_dict() for r in results]}
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(canonical_dumps(payload))
    return 0 if ok else 2


_COMMANDS = {
    "check-metric": cmd_check_metric,
    "embed": cmd_embed,
    "cover": cmd_cover,
    "lowerbound": cmd_lowerbound,
    "glue": cmd_glue,
    "selftest": cmd_selftest,
}


def _build_parser():
    parser = _Parser(prog="metric-union",
                     description="Certified Euclidean embeddings of "
                                 "two-sided metric spaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, needs_input, **flags):
        p = sub.add_parser(name)
        if needs_input:
            p.add_argument("--input", required=True)
        p.add_argument("--output", default=None)
        p.add_argument("--seed", type=int, default=0)
        if flags.get("alpha"):
            p.add_argument("--alpha", type=float, default=None)
        if flags.get("tol"):
            p.add_argument("--tol", type=float, default=1e-7)
        if flags.get("epsilon"):
            p.add_argument("--epsilon", type=float, default=None)
        if flags.get("n"):
            p.add_argument("--n", type=int, default=None)
        return p

    add("check-metric", True)
    add("embed", True, alpha=True, tol=True)
    add("cover", True, alpha=True)
    add("lowerbound", False, epsilon=True, n=True)
    add("glue", True, tol=True)
    add("selftest", False)
    return parser


def main(argv=None) -> int:
    t0 = time.perf_counter()
    try:
        args = _build_parser().parse_args(argv)
        handler = _COMMANDS[args.command]
        result = handler(args)
        if isinstance(result, int):
            code = result
        else:
            _write_report(result, args.output)
            code = 0
    except _INPUT_ERRORS as exc:
        sys.stderr.write(canonical_dumps(_error_payload(exc)))
        code = 1
    except AuditViolation as exc:
        if exc.entries is not None and getattr(args, "output", None):
            _write_report({"audit": [e.as_dict() for e in exc.entries],
                           "error": _error_payload(exc)},
                          args.output)
        sys.stderr.write(canonical_dumps(_error_payload(exc)))
        code = 2
    except MetricUnionError as exc:
        sys.stderr.write(canonical_dumps(_error_payload(exc)))
        code = 2
    sys.stderr.write(f"runtime {time.perf_counter() - t0:.3f}s\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
