"""Command-line entry point.

One configuration document (JSON) drives every command; flags override
file values so sweeps stay reproducible and versionable. Exit codes:
0 when all requested margins are within tolerance, 1 for solver errors
or violated margins (with a diagnostic dump), 2 for hypothesis and usage
violations.
"""

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import domain2d, fem2d, verify
from .errors import ConfigError, HconvexityError, HypRobinError
from .hypgeo import SpaceParams, radius_from_perimeter
from .radial import RadialProblem, solve_radial_shooting, solve_radial_weak

COMMANDS = ("ball-eig", "domain-eig", "geometry", "steiner", "parallel",
            "verify-thm1", "verify-thm4", "verify-lemmas", "sweep")
_2D_COMMANDS = tuple(c for c in COMMANDS if c != "ball-eig")
_MARGIN_TOL = 1e-6

_DEFAULTS = dict(angles=512, radial_elements=512, mesh_n_r=48,
                 mesh_n_theta=192, refinements=2)


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int = 2
    r0: float = None
    modes: tuple = ()
    samples: tuple = None
    R: float = None
    betas: tuple = ()
    offsets: tuple = ()
    angles: int = 512
    radial_elements: int = 512
    mesh_n_r: int = 48
    mesh_n_theta: int = 192
    refinements: int = 2
    out_path: str = None
    out_format: str = "csv"
    seed: int = 0
    family_count: int = 20
    dump_mesh: str = None


def _expect(cond, field, message):
    if not cond:
        raise ConfigError(field, message)


def _check_keys(obj, allowed, ctx):
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"{ctx}.{key}" if ctx else key, "unknown key")


def parse_config(text):
    """Strict parse of the JSON configuration document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<document>", f"not valid JSON: {exc}")
    _expect(isinstance(doc, dict), "<document>", "top level must be an object")
    _check_keys(doc, {"command", "n", "domain", "betas", "offsets",
                      "resolution", "family", "output", "seed"}, "")

    command = doc.get("command")
    _expect(command in COMMANDS, "command",
            f"must be one of {', '.join(COMMANDS)}; got {command!r}")

    kwargs = {"command": command}
    if "n" in doc:
        _expect(isinstance(doc["n"], int) and doc["n"] >= 2, "n",
                "must be an integer >= 2")
        kwargs["n"] = doc["n"]
    if "seed" in doc:
        _expect(isinstance(doc["seed"], int), "seed", "must be an integer")
        kwargs["seed"] = doc["seed"]

    if "domain" in doc:
        dom = doc["domain"]
        _expect(isinstance(dom, dict), "domain", "must be an object")
        _check_keys(dom, {"r0", "modes", "samples", "R"}, "domain")
        if "r0" in dom:
            _expect(isinstance(dom["r0"], (int, float)) and dom["r0"] > 0,
                    "domain.r0", "must be a positive number")
            kwargs["r0"] = float(dom["r0"])
        if "modes" in dom:
            modes = []
            for i, mode in enumerate(dom["modes"]):
                _expect(isinstance(mode, list) and len(mode) == 3,
                        f"domain.modes[{i}]", "must be [k, eps, phi]")
                k, eps, phi = mode
                _expect(isinstance(k, int) and k >= 1, f"domain.modes[{i}]",
                        "wavenumber k must be an integer >= 1")
                modes.append((k, float(eps), float(phi)))
            kwargs["modes"] = tuple(modes)
        if "samples" in dom:
            _expect(isinstance(dom["samples"], list) and dom["samples"],
                    "domain.samples", "must be a nonempty list")
            kwargs["samples"] = tuple(float(v) for v in dom["samples"])
        if "R" in dom:
            _expect(isinstance(dom["R"], (int, float)) and dom["R"] > 0,
                    "domain.R", "must be a positive number")
            kwargs["R"] = float(dom["R"])

    if "betas" in doc:
        _expect(isinstance(doc["betas"], list) and doc["betas"], "betas",
                "must be a nonempty list of numbers")
        kwargs["betas"] = tuple(float(b) for b in doc["betas"])
    if "offsets" in doc:
        _expect(isinstance(doc["offsets"], list), "offsets", "must be a list")
        kwargs["offsets"] = tuple(float(s) for s in doc["offsets"])

    if "resolution" in doc:
        res = doc["resolution"]
        _expect(isinstance(res, dict), "resolution", "must be an object")
        _check_keys(res, {"angles", "radial_elements", "mesh", "refinements"},
                    "resolution")
        if "angles" in res:
            _expect(isinstance(res["angles"], int) and res["angles"] >= 128
                    and res["angles"] % 2 == 0, "resolution.angles",
                    "must be an even integer >= 128")
            kwargs["angles"] = res["angles"]
        if "radial_elements" in res:
            _expect(isinstance(res["radial_elements"], int)
                    and res["radial_elements"] >= 16,
                    "resolution.radial_elements", "must be an integer >= 16")
            kwargs["radial_elements"] = res["radial_elements"]
        if "mesh" in res:
            mesh = res["mesh"]
            _expect(isinstance(mesh, list) and len(mesh) == 2
                    and all(isinstance(v, int) for v in mesh),
                    "resolution.mesh", "must be [n_r, n_theta]")
            _expect(mesh[0] >= 8 and mesh[1] >= 64, "resolution.mesh",
                    "needs n_r >= 8 and n_theta >= 64")
            kwargs["mesh_n_r"], kwargs["mesh_n_theta"] = mesh
        if "refinements" in res:
            _expect(isinstance(res["refinements"], int)
                    and res["refinements"] >= 0, "resolution.refinements",
                    "must be a nonnegative integer")
            kwargs["refinements"] = res["refinements"]

    if "family" in doc:
        fam = doc["family"]
        _expect(isinstance(fam, dict), "family", "must be an object")
        _check_keys(fam, {"count"}, "family")
        if "count" in fam:
            _expect(isinstance(fam["count"], int) and fam["count"] >= 0,
                    "family.count", "must be a nonnegative integer")
            kwargs["family_count"] = fam["count"]

    if "output" in doc:
        out = doc["output"]
        _expect(isinstance(out, dict), "output", "must be an object")
        _check_keys(out, {"path", "format"}, "output")
        if "path" in out:
            kwargs["out_path"] = str(out["path"])
        if "format" in out:
            _expect(out["format"] in ("csv", "json"), "output.format",
                    "must be 'csv' or 'json'")
            kwargs["out_format"] = out["format"]

    return validate(RunConfig(**kwargs))


def emit_config(cfg):
    """Canonical JSON for a RunConfig; parse_config inverts it."""
    doc = {"command": cfg.command, "n": cfg.n, "seed": cfg.seed}
    domain = {}
    if cfg.r0 is not None:
        domain["r0"] = cfg.r0
    if cfg.modes:
        domain["modes"] = [[k, eps, phi] for k, eps, phi in cfg.modes]
    if cfg.samples is not None:
        domain["samples"] = list(cfg.samples)
    if cfg.R is not None:
        domain["R"] = cfg.R
    if domain:
        doc["domain"] = domain
    if cfg.betas:
        doc["betas"] = list(cfg.betas)
    if cfg.offsets:
        doc["offsets"] = list(cfg.offsets)
    doc["resolution"] = {"angles": cfg.angles,
                         "radial_elements": cfg.radial_elements,
                         "mesh": [cfg.mesh_n_r, cfg.mesh_n_theta],
                         "refinements": cfg.refinements}
    doc["family"] = {"count": cfg.family_count}
    if cfg.out_path is not None:
        doc["output"] = {"path": cfg.out_path, "format": cfg.out_format}
    return json.dumps(doc, indent=2, sort_keys=True)


def validate(cfg):
    """Cross-field checks shared by config files and flags."""
    _expect(cfg.command in COMMANDS, "command", f"unknown {cfg.command!r}")
    if cfg.command in _2D_COMMANDS:
        _expect(cfg.n == 2, "n",
                f"command {cfg.command} works on plane domains; n must be 2")
    if cfg.command == "ball-eig":
        _expect(cfg.R is not None and cfg.R > 0, "domain.R",
                "ball-eig needs a positive ball radius")
        _expect(bool(cfg.betas), "betas", "ball-eig needs beta values")
    if cfg.command in ("verify-thm1", "verify-thm4", "sweep"):
        _expect(all(b != 0.0 for b in cfg.betas), "betas",
                "theorems require beta != 0")
    if cfg.command == "verify-thm1":
        _expect(all(b < 0.0 for b in cfg.betas), "betas",
                "the negative-parameter bound needs beta < 0")
    if cfg.command == "verify-thm4":
        _expect(all(b > 0.0 for b in cfg.betas), "betas",
                "the positive-parameter bound needs beta > 0")
    if cfg.samples is not None and cfg.r0 is not None:
        raise ConfigError("domain", "give either r0/modes or samples")
    return cfg


def _curve_from_config(cfg):
    if cfg.samples is not None:
        m = len(cfg.samples)
        theta = 2.0 * np.pi * np.arange(m) / m
        return domain2d.RadialCurve(theta=theta, r=np.asarray(cfg.samples))
    _expect(cfg.r0 is not None, "domain",
            f"command {cfg.command} needs a domain (r0/modes or samples)")
    try:
        return domain2d.make_family(cfg.r0, cfg.modes, cfg.angles)
    except ValueError as exc:
        raise ConfigError("domain", str(exc))


def _resolution(cfg):
    return verify.Resolution(angles=cfg.angles,
                             radial_elements=cfg.radial_elements,
                             mesh_n_r=cfg.mesh_n_r,
                             mesh_n_theta=cfg.mesh_n_theta,
                             refinements=cfg.refinements)


def _print_table(headers, rows):
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    line = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
    print(line)
    print("-" * len(line))
    for r in rows:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)))


def _write_rows(cfg, headers, rows):
    if cfg.out_path is None:
        return
    if cfg.out_format == "csv":
        import csv as _csv
        with open(cfg.out_path, "w", newline="", encoding="utf-8") as fh:
            w = _csv.writer(fh)
            w.writerow(headers)
            w.writerows(rows)
    else:
        doc = {"schema": verify.SCHEMA,
               "rows": [dict(zip(headers, r)) for r in rows]}
        with open(cfg.out_path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")


def _cmd_ball_eig(cfg):
    sp = SpaceParams(cfg.n)
    rows = []
    for beta in cfg.betas:
        prob = RadialProblem(sp, cfg.R, beta)
        lam_w = solve_radial_weak(prob, cfg.radial_elements).lambda1
        lam_s = lam_w if beta == 0.0 else solve_radial_shooting(prob)
        rows.append([repr(float(beta)), repr(float(lam_w)),
                     repr(float(lam_s)), repr(float(abs(lam_w - lam_s)))])
    _print_table(["beta", "lambda_weak", "lambda_shoot", "diff"], rows)
    _write_rows(cfg, ["beta", "lambda_weak", "lambda_shoot", "diff"], rows)
    return 0


def _cmd_domain_eig(cfg):
    c = _curve_from_config(cfg)
    if cfg.dump_mesh:
        mesh = fem2d.mesh_domain(c, cfg.mesh_n_r, cfg.mesh_n_theta)
        fem2d.dump_mesh(mesh, cfg.dump_mesh)
        print(f"mesh dumped to {cfg.dump_mesh}")
    rows = []
    for beta in cfg.betas or (0.0,):
        res = fem2d.solve_domain(c, beta, refinements=cfg.refinements,
                                 base_n_r=cfg.mesh_n_r,
                                 base_n_theta=cfg.mesh_n_theta)
        if res.warning:
            print(f"warning (beta={beta}): {res.warning}")
        rows.append([repr(float(beta)), repr(float(res.lambda1)),
                     repr(float(res.error_estimate)),
                     f"{res.observed_order:.3f}"])
    _print_table(["beta", "lambda1", "error_estimate", "order"], rows)
    _write_rows(cfg, ["beta", "lambda1", "error_estimate", "order"], rows)
    return 0


def _cmd_geometry(cfg):
    c = _curve_from_config(cfg)
    g = domain2d.curve_geometry(c)
    hconv, margin = domain2d.check_hconvex(g)
    rin = domain2d.inradius(c)
    gb = abs(g.total_curvature - 2 * math.pi - g.area)
    rows = [["perimeter", repr(g.perimeter)],
            ["area", repr(g.area)],
            ["kappa_min", repr(g.kappa_min)],
            ["kappa_max", repr(g.kappa_max)],
            ["total_curvature", repr(g.total_curvature)],
            ["gauss_bonnet_residual", repr(gb)],
            ["h_convex", str(hconv)],
            ["h_convex_margin", repr(margin)],
            ["inradius", repr(rin)]]
    _print_table(["quantity", "value"], rows)
    _write_rows(cfg, ["quantity", "value"], rows)
    return 0


def _cmd_steiner(cfg):
    c = _curve_from_config(cfg)
    g = domain2d.curve_geometry(c)
    offsets = cfg.offsets or (0.1, 0.4, 1.0)
    rows = []
    for s in offsets:
        got = domain2d.outer_parallel_perimeter(c, s)
        want = (g.perimeter * math.cosh(s)
                + (2 * math.pi + g.area) * math.sinh(s))
        rows.append([repr(float(s)), repr(got), repr(want),
                     repr(abs(got - want) / want)])
    _print_table(["s", "integral", "closed_form", "rel_diff"], rows)
    _write_rows(cfg, ["s", "integral", "closed_form", "rel_diff"], rows)
    return 0


def _cmd_parallel(cfg):
    c = _curve_from_config(cfg)
    table = verify.verify_perimeter_comparison(
        c, np.asarray(cfg.offsets) if cfg.offsets else None)
    rows = [[repr(float(t)), repr(float(pi)), repr(float(pb)),
             repr(float(m))]
            for t, pi, pb, m in zip(table.t, table.P_inner, table.P_ball,
                                    table.margin)]
    _print_table(["t", "P_inner", "P_ball", "margin"], rows)
    _write_rows(cfg, ["t", "P_inner", "P_ball", "margin"], rows)
    return 0


def _report_rows(reports):
    names = ["domain_id", "beta", "lambda_omega", "lambda_star", "margin",
             "status"]
    rows = [[r.domain_id, repr(r.beta), repr(r.lambda_omega),
             repr(r.lambda_star), repr(r.margin), r.status]
            for r in reports]
    return names, rows


def _finish_reports(cfg, reports):
    if cfg.out_path is not None:
        if cfg.out_format == "csv":
            verify.write_csv(reports, cfg.out_path)
        else:
            verify.write_json(reports, cfg.out_path)
    names, rows = _report_rows(reports)
    _print_table(names, rows)
    bad = [r for r in reports
           if r.status != "ok" or not (r.margin >= -_MARGIN_TOL)]
    if bad:
        print("\nmargin/solver failures; full reports:")
        for r in bad:
            print(json.dumps(asdict(r), indent=2))
        return 1
    return 0


def _cmd_verify_thm(cfg):
    c = _curve_from_config(cfg)
    resolution = _resolution(cfg)
    fn = verify.verify_thm1 if cfg.command == "verify-thm1" else \
        verify.verify_thm4
    reports = [fn(c, beta, resolution, "domain") for beta in cfg.betas]
    return _finish_reports(cfg, reports)


def _cmd_verify_lemmas(cfg):
    c = _curve_from_config(cfg)
    rate = verify.verify_lemma_diffP(c)
    comparison = verify.verify_perimeter_comparison(c)
    if rate.inconclusive:
        print("rate table inconclusive: focal horizon too small")
        rate_ok = True
    else:
        rel = rate.margin / rate.bound
        print(f"rate rows: {rate.t.size}, min margin/bound: {rel.min():.3e}")
        rate_ok = bool(rel.min() >= -1e-6)
    cmp_min = float(comparison.margin.min())
    print(f"comparison rows: {comparison.t.size}, min margin: {cmp_min:.3e}")
    cmp_ok = cmp_min >= -1e-8
    names = ["t", "P_inner", "P_ball", "margin"]
    rows = [[repr(float(t)), repr(float(a)), repr(float(b)), repr(float(m))]
            for t, a, b, m in zip(comparison.t, comparison.P_inner,
                                  comparison.P_ball, comparison.margin)]
    _write_rows(cfg, names, rows)
    if not (rate_ok and cmp_ok):
        print("\nnegative margins; diagnostic dump:")
        g = domain2d.curve_geometry(c)
        print(json.dumps({
            "perimeter": g.perimeter, "area": g.area,
            "total_curvature": g.total_curvature,
            "kappa_min": g.kappa_min, "kappa_max": g.kappa_max,
            "ball_radius": radius_from_perimeter(SpaceParams(2),
                                                 g.perimeter),
            "rate_margins": rate.margin.tolist()[:20],
            "comparison_margins": comparison.margin.tolist()[:20],
        }, indent=2))
        return 1
    return 0


def _cmd_sweep(cfg):
    family = verify.generate_family(cfg.family_count, cfg.seed, cfg.angles)
    betas = cfg.betas or (-1.0, 1.0)
    reports = verify.sweep(family, betas, _resolution(cfg))
    return _finish_reports(cfg, reports)


_DISPATCH = {
    "ball-eig": _cmd_ball_eig,
    "domain-eig": _cmd_domain_eig,
    "geometry": _cmd_geometry,
    "steiner": _cmd_steiner,
    "parallel": _cmd_parallel,
    "verify-thm1": _cmd_verify_thm,
    "verify-thm4": _cmd_verify_thm,
    "verify-lemmas": _cmd_verify_lemmas,
    "sweep": _cmd_sweep,
}


def run(cfg):
    """Execute a validated configuration; returns the exit code."""
    return _DISPATCH[cfg.command](validate(cfg))


def _add_domain_flags(p):
    p.add_argument("--r0", type=float, default=None,
                   help="base radius of the boundary curve")
    p.add_argument("--mode", action="append", default=None,
                   metavar="K:EPS:PHI",
                   help="cosine mode k:eps:phi (repeatable)")
    p.add_argument("--angles", type=int, default=None,
                   help=f"angular samples (default {_DEFAULTS['angles']})")


def _add_resolution_flags(p):
    p.add_argument("--elements", type=int, default=None,
                   help=f"radial elements "
                        f"(default {_DEFAULTS['radial_elements']})")
    p.add_argument("--mesh", default=None, metavar="NRxNT",
                   help=f"FEM base mesh (default {_DEFAULTS['mesh_n_r']}x"
                        f"{_DEFAULTS['mesh_n_theta']})")
    p.add_argument("--refinements", type=int, default=None,
                   help=f"FEM refinement count "
                        f"(default {_DEFAULTS['refinements']})")


def _add_output_flags(p):
    p.add_argument("--out", default=None, help="output file path")
    p.add_argument("--format", choices=("csv", "json"), default=None,
                   help="output format (default csv)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hyprobin",
        description="Robin eigenvalues and parallel-set geometry on "
                    "hyperbolic domains")
    parser.add_argument("--config", default=None,
                        help="JSON configuration document; flags override")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("ball-eig", help="radial eigenvalue on a ball, "
                                        "both solvers")
    p.add_argument("--n", type=int, default=None, help="dimension (default 2)")
    p.add_argument("--R", type=float, default=None, help="ball radius")
    p.add_argument("--beta", action="append", type=float, default=None,
                   help="Robin parameter (repeatable)")
    p.add_argument("--elements", type=int, default=None,
                   help=f"radial elements "
                        f"(default {_DEFAULTS['radial_elements']})")
    _add_output_flags(p)

    p = sub.add_parser("domain-eig", help="FEM eigenvalue on a plane domain")
    _add_domain_flags(p)
    _add_resolution_flags(p)
    p.add_argument("--beta", action="append", type=float, default=None)
    p.add_argument("--dump-mesh", default=None,
                   help="write the base mesh as plain text")
    _add_output_flags(p)

    for name, helptext in (("geometry", "perimeter, area, curvature, "
                                        "inradius"),
                           ("steiner", "outer parallel perimeters"),
                           ("parallel", "inner parallel profile table")):
        p = sub.add_parser(name, help=helptext)
        _add_domain_flags(p)
        if name != "geometry":
            p.add_argument("--offset", action="append", type=float,
                           default=None, help="offset value (repeatable)")
        _add_output_flags(p)

    for name in ("verify-thm1", "verify-thm4"):
        p = sub.add_parser(name, help=f"single-domain {name} margin")
        _add_domain_flags(p)
        _add_resolution_flags(p)
        p.add_argument("--beta", action="append", type=float, default=None)
        _add_output_flags(p)

    p = sub.add_parser("verify-lemmas",
                       help="perimeter decay rate and parallel comparison")
    _add_domain_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("sweep", help="family sweep from a config document")
    p.add_argument("--beta", action="append", type=float, default=None)
    p.add_argument("--count", type=int, default=None,
                   help="family size (default 20)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--angles", type=int, default=None)
    _add_resolution_flags(p)
    _add_output_flags(p)
    return parser


def _merge_flags(cfg, args):
    updates = {}
    if getattr(args, "n", None) is not None:
        updates["n"] = args.n
    if getattr(args, "R", None) is not None:
        updates["R"] = args.R
    if getattr(args, "r0", None) is not None:
        updates["r0"] = args.r0
    if getattr(args, "mode", None):
        modes = []
        for spec in args.mode:
            parts = spec.split(":")
            if len(parts) != 3:
                raise ConfigError("mode", f"expected K:EPS:PHI, got {spec!r}")
            modes.append((int(parts[0]), float(parts[1]), float(parts[2])))
        updates["modes"] = tuple(modes)
    if getattr(args, "beta", None):
        updates["betas"] = tuple(args.beta)
    if getattr(args, "offset", None):
        updates["offsets"] = tuple(args.offset)
    if getattr(args, "angles", None) is not None:
        updates["angles"] = args.angles
    if getattr(args, "elements", None) is not None:
        updates["radial_elements"] = args.elements
    if getattr(args, "mesh", None) is not None:
        try:
            nr, nt = args.mesh.lower().split("x")
            updates["mesh_n_r"], updates["mesh_n_theta"] = int(nr), int(nt)
        except ValueError:
            raise ConfigError("mesh", f"expected NRxNT, got {args.mesh!r}")
    if getattr(args, "refinements", None) is not None:
        updates["refinements"] = args.refinements
    if getattr(args, "out", None) is not None:
        updates["out_path"] = args.out
    if getattr(args, "format", None) is not None:
        updates["out_format"] = args.format
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "count", None) is not None:
        updates["family_count"] = args.count
    if getattr(args, "dump_mesh", None) is not None:
        updates["dump_mesh"] = args.dump_mesh
    return replace(cfg, **updates)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config is not None:
            with open(args.config, encoding="utf-8") as fh:
                cfg = parse_config(fh.read())
            if args.command is not None:
                cfg = replace(cfg, command=args.command)
        else:
            if args.command is None:
                parser.error("a command or --config is required")
            cfg = RunConfig(command=args.command)
        cfg = _merge_flags(cfg, args)
        return run(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except HconvexityError as exc:
        print(f"hypothesis violation: {exc}", file=sys.stderr)
        return 2
    except HypRobinError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
