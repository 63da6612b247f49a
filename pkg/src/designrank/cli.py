"""``designrank`` command line driver.

Every command writes one plain-text artifact (stdout or ``--output``) that
starts with the resolved experiment settings, the tool version and the
sha256 of each input file, so reruns with the same arguments are
byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .design import design_profile, gram_certify, rank_lower_bound, rank_lower_bound_avg
from .formats import ParseError, dumps_document, dumps_points, format_scalar, read_matrix, read_points
from .geometry import (
    PointConfig,
    affine_dimension,
    generate_lines_config,
    grid_config,
    mr3_check,
    mr_delta,
    sg_delta,
    special_lines,
)
from .lcc import LccConfig, lcc_audit, partition_iterate
from .matrix import COMPLEX
from .rank import rank
from .scaling import DEFAULT_MAX_ITERS, scale_l2, sinkhorn_l1
from .triples import triple_family

COMMAND_OPTIONS = {
    "scale": ("norm",),
    "sg-audit": ("exclude_self",),
    "lcc-audit": ("delta",),
    "lcc-decompose": ("delta",),
    "triples": ("r",),
}


@dataclass
class ExperimentSpec:
    command: str
    inputs: list
    seed: int
    eps: float
    tol_factor: float
    exact: bool
    max_iters: int
    output: str | None
    extra: dict = field(default_factory=dict)

    def header(self):
        body = {
            "command": self.command,
            "tool_version": __version__,
            "seed": self.seed,
            "eps": self.eps,
            "tol_factor": self.tol_factor,
            "exact": self.exact,
            "max_iters": self.max_iters,
        }
        body.update(self.extra)
        for t, path in enumerate(self.inputs):
            body[f"input_{t}"] = path
            with open(path, "rb") as fh:
                body[f"input_{t}_sha256"] = hashlib.sha256(fh.read()).hexdigest()
        return body


def _floats(xs):
    return " ".join(repr(float(x)) for x in xs)


def _certify(spec, args):
    A = read_matrix(args.matrix)
    cert = gram_certify(A, eps=spec.eps, max_iters=spec.max_iters)
    prof = design_profile(A)
    r = rank(A, spec.tol_factor, exact=spec.exact)
    body = cert.to_dict()
    body["exact_rank"] = r.value
    body["rank_method"] = r.method
    body["integer_bound"] = cert.integer_bound
    body["verdict"] = "none" if cert.bound is None else ("PASS" if r.value >= cert.integer_bound else "FAIL")
    return {"certificate": body, "profile": _profile_body(prof, A.n)}


def _profile_body(prof, n):
    return {
        "n": n, "q": prof.q, "k": prof.k, "t": prof.t,
        "sum_sq_intersections": prof.sum_sq_intersections,
        "formula_bound": rank_lower_bound(n, prof.q, prof.k, prof.t),
        "averaged_bound": rank_lower_bound_avg(n, prof.q, prof.k, prof.sum_sq_intersections),
    }


def _profile(spec, args):
    A = read_matrix(args.matrix)
    return {"profile": _profile_body(design_profile(A), A.n)}


def _scale(spec, args):
    A = read_matrix(args.matrix)
    fn = scale_l2 if args.norm == "l2" else sinkhorn_l1
    res = fn(A, eps=spec.eps, max_iters=spec.max_iters)
    rows = {f"row_{i + 1}": " ".join(format_scalar(x, COMPLEX) for x in row) for i, row in enumerate(res.scaled)}
    return {
        "scaling": {
            "norm": args.norm, "iterations": res.iterations, "achieved_eps": res.achieved_eps,
            "converged": res.converged, "row_coef": _floats(res.rho), "col_coef": _floats(res.gamma),
        },
        "scaled_matrix": rows,
    }


def _points(path, need_colors=False):
    pf = read_points(path)
    if need_colors and pf.colors is None:
        raise ValueError("point file has no color column")
    return PointConfig(pf.points, pf.colors)


def _sg_audit(spec, args):
    C = _points(args.points)
    delta = sg_delta(C, include_self=not args.exclude_self)
    dim = affine_dimension(C, spec.tol_factor)
    bound = None if delta == 0 else 13 / float(delta) ** 2
    verdict = "PASS" if bound is None or dim < 13 / Fraction(delta) ** 2 else "FAIL"
    return {"sg_audit": {
        "n": C.n, "d": C.d, "special_lines": len(special_lines(C)), "delta": str(delta),
        "delta_float": float(delta), "dimension": dim, "dimension_bound": bound, "verdict": verdict,
    }}


def _mr_audit(spec, args):
    C = _points(args.points, need_colors=True)
    colors = set(C.colors)
    body = {"n": C.n, "colors": " ".join(map(str, sorted(colors))), "dimension": affine_dimension(C, spec.tol_factor)}
    if colors == {1, 2}:
        delta = mr_delta(C)
        body.update(mode="two-color", delta=str(delta), delta_float=float(delta))
    else:
        body.update(mode="three-color", mr3=mr3_check(C))
    return {"mr_audit": body}


def _lcc_config(path):
    return LccConfig(read_points(path).expanded())


def _lcc_audit(spec, args):
    C = _lcc_config(args.points)
    audit = lcc_audit(C)
    out = {"lcc_audit": audit.to_dict()}
    if args.delta is not None:
        delta = Fraction(args.delta)
        verdict = audit.is_lcc(delta)
        body = {"delta": str(delta), "verdict": {True: "CERTIFIED", False: "REFUTED", None: "UNDECIDED"}[verdict]}
        kill = audit.killing_set(delta)
        if kill is not None:
            body["killing_index"] = kill[0] + 1
            body["killing_set"] = " ".join(str(v + 1) for v in sorted(kill[1]))
        out["lcc_verdict"] = body
    return out


def _lcc_decompose(spec, args):
    C = _lcc_config(args.points)
    trace = partition_iterate(C, Fraction(args.delta), seed=spec.seed)
    steps = {f"step_{t + 1}": f"{s.kind} size={s.size} dim={s.dimension} added={s.added}"
             for t, s in enumerate(trace.steps)}
    return {"decomposition": {"m": C.m, "delta": str(Fraction(args.delta)), "steps": len(trace.steps),
                              "final_dimension": trace.final_dimension,
                              "direct_dimension": trace.direct_dimension}, "trace": steps}


def _gen(spec, args):
    if args.kind == "grid":
        C = grid_config(args.size)
    else:
        C = generate_lines_config(args.num_lines, args.pts_per_line, args.dim, seed=spec.seed)
    return dumps_points(C.points, C.domain)


def _triples(spec, args):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerows(triple_family(args.r))
    return buf.getvalue()


def _rank(spec, args):
    A = read_matrix(args.matrix)
    r = rank(A, spec.tol_factor, exact=spec.exact)
    body = {"m": A.m, "n": A.n, "domain": str(A.domain), "value": r.value, "method": r.method,
            "tolerance": r.tolerance}
    if r.singular_values is not None:
        body["singular_values"] = _floats(r.singular_values)
    return {"rank": body}


HANDLERS = {
    "certify": _certify, "profile": _profile, "scale": _scale, "sg-audit": _sg_audit,
    "mr-audit": _mr_audit, "lcc-audit": _lcc_audit, "lcc-decompose": _lcc_decompose,
    "gen": _gen, "triples": _triples, "rank": _rank,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--eps", type=float, default=1e-9, help="scaling tolerance")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol-factor", type=float, default=1.0, help="SVD rank threshold multiplier")
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="exact", action="store_true", default=True,
                      help="exact rank backends where the domain allows (default)")
    mode.add_argument("--float", dest="exact", action="store_false", help="force the SVD rank backend")
    common.add_argument("--max-iters", type=int, default=DEFAULT_MAX_ITERS)
    common.add_argument("--output", "-o", default=None, help="write the artifact here instead of stdout")

    p = argparse.ArgumentParser(prog="designrank", description="Design-matrix rank certificates and incidence audits.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("certify", "profile", "rank"):
        sub.add_parser(name, parents=[common]).add_argument("matrix")
    sc = sub.add_parser("scale", parents=[common])
    sc.add_argument("matrix")
    sc.add_argument("--norm", choices=("l1", "l2"), default="l2")
    sg = sub.add_parser("sg-audit", parents=[common])
    sg.add_argument("points")
    sg.add_argument("--exclude-self", action="store_true", help="do not count the point itself")
    sub.add_parser("mr-audit", parents=[common]).add_argument("points")
    la = sub.add_parser("lcc-audit", parents=[common])
    la.add_argument("points")
    la.add_argument("--delta", default=None, help="rational delta to decide, e.g. 1/6")
    ld = sub.add_parser("lcc-decompose", parents=[common])
    ld.add_argument("points")
    ld.add_argument("--delta", required=True)
    g = sub.add_parser("gen", parents=[common])
    g.add_argument("kind", choices=("lines", "grid"))
    g.add_argument("--num-lines", type=int, default=3)
    g.add_argument("--pts-per-line", type=int, default=4)
    g.add_argument("--dim", type=int, default=6)
    g.add_argument("--size", type=int, default=3)
    sub.add_parser("triples", parents=[common]).add_argument("r", type=int)
    return p


def _comment(header):
    return "".join(f"# {k} = {v}\n" for k, v in header.items())


def run(argv=None):
    """Parse ``argv``, execute one command and return ``(status, artifact_text)``."""
    args = build_parser().parse_args(argv)
    inputs = [getattr(args, a) for a in ("matrix", "points") if getattr(args, a, None) is not None]
    wanted = COMMAND_OPTIONS.get(args.command, ())
    if args.command == "gen":
        wanted = ("kind", "size") if args.kind == "grid" else ("kind", "num_lines", "pts_per_line", "dim")
    extra = {k: getattr(args, k) for k in wanted if getattr(args, k) is not None}
    spec = ExperimentSpec(args.command, inputs, args.seed, args.eps, args.tol_factor, args.exact,
                          args.max_iters, args.output, extra)
    result = HANDLERS[args.command](spec, args)
    header = spec.header()
    if isinstance(result, str):
        # point files and CSV keep their own syntax; settings go in comment lines
        text = _comment(header) + result
    else:
        text = dumps_document({"experiment": header, **result})
    return 0, text


def main(argv=None):
    try:
        status, text = run(argv)
    except (ParseError, OSError) as exc:
        print(f"designrank: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        print(f"designrank: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    out = build_parser().parse_args(argv).output
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
