"""Command-line front end: ``geomtomo {compute, verify, sweep, battery}``.

Exit status is 0 when every non-diagnostic check passes, 2 when a check
fails and 1 on configuration errors.
"""
from __future__ import annotations

import argparse
import csv
from datetime import datetime, timezone
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__
from . import bodies as bd
from . import functionals as fn
from . import measures as ms
from .bodies import BodySpec, UnsupportedBody
from .quadrature import grassmann_sample
from .verifiers import battery as bt
from .verifiers import hypotheses as hy
from .verifiers import lemmas as lm
from .verifiers import theorems as th
from .verifiers.report import FAIL, _clean
from .verifiers.sweeps import SWEEPS, sharpness_sweep

EXIT_OK, EXIT_CONFIG, EXIT_FAIL = 0, 1, 2

COMPUTE = ("volume", "measure", "section", "projection", "mu_projection", "mixed", "surface_area",
           "mean_width", "isotropic_constant", "radii", "support", "radial", "profile")
CHECKS = ("gk", "thm12a", "thm12b", "cor13a", "cor13b", "prop31", "aleksandrov", "thm14", "thm51", "prop53",
          "thm61", "averaged_projection") + lm.LEMMAS


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# spec parsing


def _load_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed JSON in {what}: line {e.lineno}, column {e.colno}: {e.msg}") from None


def _json_source(text: str, what: str):
    """Inline JSON or a path to a JSON file; None for shorthand specs."""
    text = text.strip()
    if text.startswith("{") or text.startswith("["):
        return _load_json(text, what)
    if text.endswith(".json") or os.path.isfile(text):
        try:
            with open(text) as f:
                return _load_json(f.read(), f"{what} file {text}")
        except OSError as e:
            raise ConfigError(f"cannot read {what} file {text}: {e.strerror}") from None
    return None


def _floats(s: str):
    return [float(x) for x in s.split(",") if x.strip()]


def parse_body(text: str, dim: int | None = None) -> BodySpec:
    """``ball[:R]``, ``ellipsoid:a1,..,an``, ``box:w1,..,wn`` (half-widths, or one value),
    ``cross[:scale]``, ``lp:p[,scale]``, or a JSON body spec (inline or file)."""
    data = _json_source(text, "--body")
    if data is not None:
        try:
            return BodySpec.from_json(data)
        except (KeyError, TypeError) as e:
            raise ConfigError(f"body spec is missing field {e}") from None
    kind, _, arg = text.partition(":")
    vals = _floats(arg) if arg else []
    n = 3 if dim is None else int(dim)
    kind = kind.strip().lower()
    if kind == "ball":
        return bd.ball(n, vals[0] if vals else 1.0)
    if kind == "ellipsoid":
        if not vals:
            raise ConfigError("ellipsoid needs axes, e.g. ellipsoid:1,2,3")
        return bd.ellipsoid(vals)
    if kind == "box":
        if len(vals) <= 1:
            vals = [vals[0] if vals else 1.0] * n
        return bd.box(vals)
    if kind in ("cross", "cross_polytope"):
        return bd.cross_polytope(n, vals[0] if vals else 1.0)
    if kind in ("lp", "lp_ball"):
        if not vals:
            raise ConfigError("lp ball needs p, e.g. lp:3")
        return bd.lp_ball(n, vals[0], vals[1] if len(vals) > 1 else 1.0)
    raise ConfigError(f"unknown body {text!r}; use ball, ellipsoid, box, cross, lp or a JSON spec")


def parse_measure(text: str | None, n: int) -> ms.MeasureSpec:
    """``lebesgue``, ``gaussian[:s[,T]]``, ``radial_power:p``, ``cone_power[:a[,w1,..,wn]]`` or JSON."""
    if text is None:
        return ms.lebesgue(n)
    data = _json_source(text, "--measure")
    if data is not None:
        try:
            return ms.MeasureSpec.from_json(data)
        except (KeyError, TypeError) as e:
            raise ConfigError(f"measure spec is missing field {e}") from None
    kind, _, arg = text.partition(":")
    vals = _floats(arg) if arg else []
    kind = kind.strip().lower()
    if kind == "lebesgue":
        return ms.lebesgue(n)
    if kind == "gaussian":
        return ms.gaussian(n, vals[0] if vals else 1.0, vals[1] if len(vals) > 1 else None)
    if kind == "radial_power":
        if not vals:
            raise ConfigError("radial_power needs p, e.g. radial_power:2")
        return ms.radial_power(n, vals[0])
    if kind == "cone_power":
        a = vals[0] if vals else 1.0
        w = vals[1:] if len(vals) > 1 else [1.0] + [0.0] * (n - 1)
        return ms.cone_power(w, a)
    raise ConfigError(f"unknown measure {text!r}; use lebesgue, gaussian, radial_power, cone_power or JSON")


def _theta(text: str | None, n: int) -> np.ndarray:
    if text is None:
        t = np.zeros(n)
        t[-1] = 1.0
        return t
    t = np.array(_floats(text))
    if t.shape != (n,) or not np.linalg.norm(t) > 0:
        raise ConfigError(f"--theta needs {n} numbers, not all zero")
    return t / np.linalg.norm(t)


# ---------------------------------------------------------------------------
# commands


def _value_row(name, v):
    return {"quantity": name, "value": v.value, "error_estimate": v.error_estimate, "method": v.method,
            "inputs_digest": v.inputs_digest}


def _plain_row(name, value, method="analytic"):
    return {"quantity": name, "value": float(value), "error_estimate": 0.0, "method": method,
            "inputs_digest": fn.digest(name, value)}


def cmd_compute(args):
    bodies = args.body or ["ball"]
    K = parse_body(bodies[0], args.dim)
    n = K.dim
    m = parse_measure(args.measure, n)
    lv, seed = args.level, args.seed
    f = args.functional
    k = n - 1 if args.k is None else args.k
    if f == "volume":
        rows = [_value_row("volume", fn.body_measure(ms.lebesgue(n), K, lv, seed))]
    elif f == "measure":
        rows = [_value_row("measure", fn.body_measure(m, K, lv, seed))]
    elif f in ("section", "projection") and k != n - 1:
        frame = grassmann_sample(n, k, 1, seed)[0]
        g = fn.kdim_section_volume if f == "section" else fn.kdim_projection_volume
        rows = [_value_row(f"{f}_k", g(K, frame, lv if f == "section" else None, seed))]
    elif f == "section":
        rows = [_value_row("section", fn.section_measure(m, K, _theta(args.theta, n), lv, seed))]
    elif f == "projection":
        rows = [_value_row("projection", fn.projection_area(K, _theta(args.theta, n), lv, seed))]
    elif f == "mu_projection":
        rows = [_value_row("mu_projection", fn.mu_projection(m, K, _theta(args.theta, n), lv, seed=seed))]
    elif f == "mixed":
        other = args.other or "self"
        if other == "self":
            B = fn.SELF
        elif other.startswith("segment"):
            _, _, t = other.partition(":")
            B = fn.Segment(_theta(t or None, n))
        else:
            B = parse_body(other, n)
        rows = [_value_row("mixed", fn.mixed_measure(m, K, B, args.method or "boundary_integral", lv, seed))]
    elif f == "surface_area":
        rows = [_value_row("surface_area", fn.surface_area(K, lv, seed))]
    elif f == "mean_width":
        rows = [_value_row("mean_width", fn.mean_width(K, lv, seed))]
    elif f == "isotropic_constant":
        rows = [_value_row("isotropic_constant", fn.isotropic_constant(K, args.samples, seed))]
    elif f == "radii":
        r, R = bd.radii(K)
        rows = [_plain_row("inradius", r), _plain_row("circumradius", R)]
    elif f == "support":
        rows = [_plain_row("support", bd.support(K, _theta(args.theta, n)))]
    elif f == "radial":
        rows = [_plain_row("radial", bd.radial(K, _theta(args.theta, n)))]
    elif f == "profile":
        rows = [_plain_row(f"profile[t={t:.6g}]", a, "polar_quadrature")
                for t, a in fn.parallel_section_profile(K, _theta(args.theta, n), None, lv, seed)]
    else:
        raise ConfigError(f"unknown functional {f!r}")
    config = {"functional": f, "body": K.to_json(), "measure": m.to_json(), "level": lv, "seed": seed}
    columns = ["quantity", "value", "error_estimate", "method", "inputs_digest"]
    return config, rows, [[r[c] for c in columns] for r in rows], columns, EXIT_OK


def _check_config(args):
    """Merge a JSON check config (``--check path.json``) with flags."""
    cfg = {"check": args.check}
    data = _json_source(args.check, "--check") if args.check else None
    if isinstance(data, dict):
        cfg = dict(data)
    if "check" not in cfg or cfg["check"] not in CHECKS:
        raise ConfigError(f"unknown check {cfg.get('check')!r}; expected one of {', '.join(CHECKS)}")
    for key in ("r", "epsilon", "k", "grid", "level", "seed"):
        v = getattr(args, key, None)
        if v is not None and key not in (data or {}):
            cfg[key] = v
    if args.body and "bodies" not in cfg:
        cfg["bodies"] = args.body
    if args.measure and "measure" not in cfg:
        cfg["measure"] = args.measure
    if args.enforce:
        cfg["enforce"] = True
    return cfg


def _as_body(x, dim):
    return BodySpec.from_json(x) if isinstance(x, dict) else parse_body(str(x), dim)


def _as_measure(x, n):
    return ms.MeasureSpec.from_json(x) if isinstance(x, dict) else parse_measure(x, n)


def run_check(cfg: dict, dim: int | None = None):
    name = cfg["check"]
    level = int(cfg.get("level", 3))
    seed = int(cfg.get("seed", 0))
    specs = cfg.get("bodies") or ["ball"]
    K = _as_body(specs[0], dim)
    L = _as_body(specs[1], K.dim) if len(specs) > 1 else K
    n = K.dim
    m = _as_measure(cfg.get("measure"), n)
    grid = hy.hyperplane_grid(n, int(cfg.get("grid", hy.DEFAULT_GRID_LEVEL)))
    enforce = bool(cfg.get("enforce", False))
    r = float(cfg.get("r", 1.0))
    eps = cfg.get("epsilon", 0.0)
    eps = eps if eps == "auto" else float(eps)
    k = cfg.get("k")

    def scaled(pair, scale, measure=None, g=grid):
        nonlocal K, L
        if enforce:
            s = hy.enforce_hypothesis(K, L, pair, g, measure, level, seed, scale=scale)
            if scale == "K":
                K = bd.dilate(K, s)
            else:
                L = bd.dilate(L, s)

    if name == "gk":
        kk = n - 1 if k is None else int(k)
        if kk == n - 1:
            scaled(("projection", "section"), "K")
            return th.verify_gk(K, L, kk, grid, level=level, seed=seed)
        frames = hy.frame_grid(n, kk, 32, seed)
        scaled(("projection_k", "section_k"), "K", g=frames)
        return th.verify_gk(K, L, kk, frames=frames, level=level, seed=seed)
    if name in ("thm12a", "thm12b"):
        variant = name[-1]
        if variant == "a":
            scaled(("section", "projection"), "L")
            return th.verify_thm12(K, L, None, "a", grid, level, seed, diagnostics=True)
        scaled(("section", "mu_projection"), "K", m)
        return th.verify_thm12(K, L, m, "b", grid, level, seed)
    if name in ("cor13a", "cor13b"):
        return th.verify_cor13(K, L, m if name == "cor13b" else None, name[-1], grid, level, seed, enforce=enforce)
    if name == "prop31":
        kk = n - 1 if k is None else int(k)
        frames = hy.frame_grid(n, kk, 32, seed)
        scaled(("section_k", "projection_k"), "K", g=frames)
        return th.verify_prop31(K, L, kk, frames, seed=seed, level=level)
    if name == "aleksandrov":
        return th.aleksandrov_check(K, n - 1 if k is None else int(k), seed=seed, level=level)
    if name in ("thm14", "thm51", "thm61"):
        if name == "thm14":
            th._need_homogeneous_concave(m)
        scaled(("mu_projection", "section"), "L", m)
        if name == "thm14":
            return th.verify_thm14(K, L, m, eps, grid, level, seed)
        if name == "thm51":
            return th.verify_thm51(K, L, m, r, grid, level, seed)
        return th.verify_thm61(K, L, m, r, grid, level, seed)
    if name == "prop53":
        return th.verify_prop53(K, m, None if k is None else int(k), seed=seed, level=level)
    if name == "averaged_projection":
        return lm.averaged_projection_check(m, K, level, seed)
    if name == "remark41" and cfg.get("bodies"):
        return lm.remark41_check(m, K, L, level, seed, enforce=enforce)
    # remaining lemma checks run on the seeded instance
    return lm.lemma_instance(name, seed, level)


def _report_rows(reports):
    rows = []
    for rep in reports:
        for r in rep.all_reports():
            rows.append(r.row())
    return rows


def _exit_for(reports):
    return EXIT_FAIL if any(r.failed for r in reports) else EXIT_OK


def cmd_verify(args):
    cfg = _check_config(args)
    rep = run_check(cfg, args.dim)
    rows = _report_rows([rep])
    columns = list(rows[0])
    return cfg, [rep.to_json()], [[r[c] for c in columns] for r in rows], columns, _exit_for([rep])


def _ints(s):
    return [int(x) for x in s.split(",") if x.strip()]


def cmd_sweep(args):
    cfg = {"name": args.name}
    if args.n:
        ns = _ints(args.n)
        cfg["n"] = ns if args.name in ("remark61", "remark41") else ns[0]
    if args.p:
        cfg["p"] = _floats(args.p)
    if args.eps:
        cfg["eps"] = _floats(args.eps)
    if args.r:
        cfg["r"] = _floats(args.r)
    if args.levels:
        cfg["levels"] = _ints(args.levels)
    if args.k is not None:
        cfg["k"] = args.k
    if args.measure:
        cfg["measure"] = args.measure
    if args.check:
        cfg["check"] = args.check
    if args.name not in ("remark32",):
        cfg["level"] = args.level
    table = sharpness_sweep(cfg)
    if args.figure:
        from .plotting import plot_sweep

        plot_sweep(table, args.figure)
    verdicts = [v for c in table.columns if c.startswith("verdict") for v in table.column(c)]
    status = EXIT_FAIL if FAIL in verdicts else EXIT_OK
    rows = _clean([list(r) for r in table.rows])
    return _clean(table.config) | {"name": table.name}, [table.to_json()], rows, table.columns, status


def cmd_battery(args):
    if args.manifest:
        data = _json_source(args.manifest, "--manifest")
        if data is None:
            raise ConfigError("--manifest must be a JSON file or inline JSON")
        entries = data["checks"] if isinstance(data, dict) else data
        reports = bt.run_manifest(entries, args.level)
        cfg = {"manifest": entries, "level": args.level, "seed": args.seed}
    else:
        reports = bt.run_suite(args.suite, args.seed, args.level, args.count)
        cfg = {"suite": args.suite, "level": args.level, "seed": args.seed, "count": args.count}
    if args.figure:
        from .plotting import plot_battery

        plot_battery(reports, args.figure)
    rows = _report_rows(reports)
    columns = list(rows[0]) if rows else []
    counts = {}
    for r in reports:
        counts[r.verdict] = counts.get(r.verdict, 0) + 1
    cfg["verdict_counts"] = dict(sorted(counts.items()))
    return cfg, [r.to_json() for r in reports], [[r[c] for c in columns] for r in rows], columns, _exit_for(reports)


# ---------------------------------------------------------------------------
# output


def _document(command, config, results, columns, rows, seed):
    return _clean({
        "tool": "geomtomo",
        "version": __version__,
        "command": command,
        "seed": seed,
        "config": config,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "table": {"columns": columns, "rows": rows},
        "results": results,
    })


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else str(v)


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    buf.write(f"# geomtomo {doc['command']} version={doc['version']} seed={doc['seed']}\n")
    buf.write("# config=" + json.dumps(doc["config"], sort_keys=True) + "\n")
    buf.write(f"# timestamp={doc['timestamp']}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(doc["table"]["columns"])
    for row in doc["table"]["rows"]:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="geomtomo", description="Sections, projections and measures of convex bodies.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--level", type=int, default=3, choices=range(1, 6), metavar="{1..5}",
                        help="quadrature level (default 3)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized rules and instances (default 0)")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--dim", type=int, help="ambient dimension for shorthand bodies (default 3)")
    common.add_argument("--body", action="append", help="body spec; repeat for K then L")
    common.add_argument("--measure", help="measure spec (default lebesgue)")
    common.add_argument("--k", type=int, help="subspace dimension")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", parents=[common], help="evaluate one functional")
    c.add_argument("functional", choices=COMPUTE)
    c.add_argument("--theta", help="direction as comma-separated coordinates (default e_n)")
    c.add_argument("--other", help="second argument of a mixed measure: self, segment[:theta] or a body")
    c.add_argument("--method", choices=("boundary_integral", "finite_difference"))
    c.add_argument("--samples", type=int, default=200_000, help="samples for the isotropic constant")

    v = sub.add_parser("verify", parents=[common], help="run one check")
    v.add_argument("--check", required=True, help=f"check id ({', '.join(CHECKS)}) or a JSON config")
    v.add_argument("--r", type=float, help="free radius of the bounded-density checks (default 1)")
    v.add_argument("--epsilon", help="stability parameter (number or 'auto')")
    v.add_argument("--grid", type=int, help="level of the hypothesis direction grid (default 2)")
    v.add_argument("--enforce", action="store_true", help="dilate one body until the hypothesis holds")

    s = sub.add_parser("sweep", parents=[common], help="parameter sweep against predicted ratios")
    s.add_argument("name", choices=sorted(SWEEPS))
    s.add_argument("--n", help="dimension(s), comma separated")
    s.add_argument("--p", help="exponents p for remark31")
    s.add_argument("--eps", help="eps values for thm14_eps")
    s.add_argument("--r", help="radii for r_sweep")
    s.add_argument("--levels", help="quadrature levels for remark32")
    s.add_argument("--check", choices=("thm51", "thm61"), help="check for r_sweep")
    s.add_argument("--figure", help="save a PNG plot of the table")

    b = sub.add_parser("battery", parents=[common], help="run a seeded suite of checks")
    b.add_argument("--suite", choices=bt.SUITES, default="lemma_bank")
    b.add_argument("--count", type=int, help="number of instances (default: suite size)")
    b.add_argument("--manifest", help="JSON list of {check_id, seed} entries to run instead of a suite")
    b.add_argument("--figure", help="save a PNG plot of relative slacks")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "measure", None) and args.command == "sweep":
        args.measure = args.measure.strip()
    handlers = {"compute": cmd_compute, "verify": cmd_verify, "sweep": cmd_sweep, "battery": cmd_battery}
    try:
        config, results, rows, columns, status = handlers[args.command](args)
    except (ConfigError, th.UnsupportedCombination, UnsupportedBody, ValueError, KeyError, TypeError) as e:
        kind = type(e).__name__
        msg = str(e) if not isinstance(e, KeyError) else f"missing key {e}"
        print(f"geomtomo: error ({kind}): {msg}", file=sys.stderr)
        return EXIT_CONFIG
    doc = _document(args.command, config, results, columns, rows, args.seed)
    text = render(doc, args.format)
    if args.output:
        with open(args.output, "w") as f:
            f.write(text)
        print(f"geomtomo {args.command}: wrote {args.output} (exit {status})")
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
