"""``helm-open`` command line runner.

    helm-open <command> [--config FILE] [--key value ...] [--trace] [--out DIR]

Commands are ``solve``, ``study``, ``exact``, ``mesh`` and ``scan``. The
config file holds flat ``key = value`` lines (``#`` starts a comment) and
every key can also be given as a flag; flags win. List-valued keys take
comma-separated values.
"""

import argparse
import csv
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .errors import HelmOpenError, NonPositiveIndex, ParseError, ValidationError
from .refraction import check_admissibility, parse_refraction

COMMANDS = ("solve", "study", "exact", "mesh", "scan")


def _num(x):
    """Round-trippable decimal text for a real number."""
    return repr(float(x))



def _floats(s):
    return tuple(float(x) for x in s.split(",") if x.strip())


def _ints(s):
    return tuple(int(x) for x in s.split(",") if x.strip())


def _bool(s):
    v = str(s).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


# key -> (parser, default); list keys take comma-separated values
KEYS = {
    "shape": (str, "annulus"),
    "r_hat": (float, 0.5),
    "R": (_floats, None),
    "j": (_ints, (0,)),
    "k": (_floats, (1.0,)),
    "refraction": (str, "constant:1"),
    "h": (float, 0.1),
    "inner_h": (float, 0.02),
    "refine": (int, 0),
    "weighted": (_bool, None),
    "epsilon": (float, 1e-8),
    "max_iterations": (int, 500),
    "outer": (str, "neumann"),
    "a": (_floats, (0.0, 0.1, 0.8)),
    "R_ref": (float, 8.0),
    "n_r": (int, 16),
    "n_theta": (int, 64),
    "field_format": (str, "csv"),
    "seed": (int, 42),
}

_DEFAULT_R = {"solve": (2.0,), "study": (1.0, 2.0, 4.0, 8.0), "exact": (2.0,), "mesh": (2.0,), "scan": (2.0, 4.0, 8.0, 12.0)}


@dataclass
class RunConfig:
    command: str
    values: dict = field(default_factory=dict)
    trace: bool = False
    out: str = "."

    def __getitem__(self, key):
        return self.values[key]

    @property
    def refraction_model(self):
        return parse_refraction(self.values["refraction"])


def parse_config_text(text, source="<config>"):
    """Parse ``key = value`` lines into a dict of raw strings."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ParseError(f"{source}:{lineno}: unknown key {key!r}")
        raw[key] = (value, f"{source}:{lineno}")
    return raw


def parse_config(command, text="", overrides=None, trace=False, out=".", source="<config>"):
    """Resolve a :class:`RunConfig` from config text and flag overrides."""
    if command not in COMMANDS:
        raise ParseError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    raw = parse_config_text(text, source)
    for key, value in (overrides or {}).items():
        if key not in KEYS:
            raise ParseError(f"--{key}: unknown option")
        raw[key] = (value, f"--{key}")
    values = {}
    for key, (conv, default) in KEYS.items():
        if key in raw:
            value, where = raw[key]
            try:
                values[key] = conv(value)
            except ValueError as exc:
                raise ParseError(f"{where}: bad value {value!r} for {key}: {exc}") from exc
        else:
            values[key] = default
    if values["R"] is None:
        values["R"] = _DEFAULT_R[command]
    cfg = RunConfig(command, values, trace, out)
    validate(cfg)
    return cfg


def validate(cfg):
    v = cfg.values
    if v["shape"] not in ("annulus", "ellipse", "square"):
        raise ValidationError(f"shape must be annulus, ellipse or square, got {v['shape']!r}")
    if v["outer"] not in ("neumann", "dirichlet"):
        raise ValidationError("outer must be neumann or dirichlet")
    if v["field_format"] not in ("csv", "vtk", "both", "none"):
        raise ValidationError("field_format must be csv, vtk, both or none")
    if not v["r_hat"] > 0:
        raise ValidationError("r_hat must be positive")
    for R in v["R"]:
        if not R > v["r_hat"]:
            raise ValidationError(f"R = {R} must exceed r_hat = {v['r_hat']}")
    if any(j < 0 for j in v["j"]) or any(k <= 0 for k in v["k"]):
        raise ValidationError("j must be nonnegative and k positive")
    if not (v["h"] > 0 and v["inner_h"] > 0 and v["epsilon"] > 0 and v["max_iterations"] >= 1):
        raise ValidationError("h, inner_h, epsilon must be positive and max_iterations >= 1")
    if v["refine"] < 0:
        raise ValidationError("refine must be nonnegative")
    try:
        model = parse_refraction(v["refraction"])
        check_admissibility(model, max(v["R"]))
    except NonPositiveIndex as exc:
        raise ValidationError(f"refraction {v['refraction']!r}: {exc}") from exc
    if cfg.command == "scan":
        for a in v["a"]:
            if not 0 <= a < 2:
                raise ValidationError(f"scan parameter a = {a} must lie in [0, 2)")
    if v["weighted"] is None:
        v["weighted"] = not model.is_constant


# ------------------------------------------------------------------ runs


def _mesh(cfg, R):
    from .geometry import DomainSpec, Shape, build_mesh, refine_uniform

    mesh = build_mesh(DomainSpec(Shape(cfg["shape"]), cfg["r_hat"], R), cfg["h"], inner_h=cfg["inner_h"])
    for _ in range(cfg["refine"]):
        mesh = refine_uniform(mesh)
    return mesh


def _out(cfg, name):
    os.makedirs(cfg.out, exist_ok=True)
    return os.path.join(cfg.out, name)


def _write_csv(path, header, rows):
    tmp = path + ".partial"
    with open(tmp, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    os.replace(tmp, path)


def run_solve(cfg, log):
    from .analysis import error_norms
    from .cgm import CgmConfig, minimize
    from .exact import ModeSolution
    from .fem import HelmholtzProblem, write_field_csv, write_field_vtk
    from .functional import FunctionalConfig
    from .geometry import Region, region_mask

    model = cfg.refraction_model
    functional = FunctionalConfig(weighted=cfg["weighted"])
    cgm = CgmConfig(cfg["epsilon"], cfg["max_iterations"])
    rows = []
    for R in cfg["R"]:
        mesh = _mesh(cfg, R)
        for j in cfg["j"]:
            for k in cfg["k"]:
                g = lambda p, j=j: np.cos(j * np.arctan2(p[:, 1], p[:, 0]))
                problem = HelmholtzProblem(mesh, k, model, g, cfg["outer"])
                tag = f"R{R:g}_j{j}_k{k:g}"
                trace = _out(cfg, f"trace_{tag}.csv") if cfg.trace else None
                run = minimize(problem, functional, cgm, trace=trace)
                line = [R, j, k, mesh.n_vertices, run.iterations, int(run.converged), _num(run.J)]
                if model.is_constant and model.n0 == 1.0:
                    ctx = dict(k=k, functional=functional)
                    exact = ModeSolution(j, k, cfg["r_hat"])
                    unit = region_mask(mesh, Region.ANNULUS_UNIT) if R >= 1 else None
                    e = error_norms(run.u_star, exact, mesh, unit, **ctx)
                    line += [_num(e.L2_rel), _num(e.H1_rel)]
                else:
                    line += ["", ""]
                rows.append(line)
                fmt = cfg["field_format"]
                if fmt in ("csv", "both"):
                    write_field_csv(mesh, run.u_star, _out(cfg, f"field_{tag}.csv"))
                if fmt in ("vtk", "both"):
                    write_field_vtk(mesh, run.u_star, _out(cfg, f"field_{tag}.vtk"))
                log(f"solve {tag}: {mesh.n_vertices} vertices, {run.iterations} iterations, J = {run.J:.6g}")
    _write_csv(_out(cfg, "solve.csv"), ["R", "j", "k", "vertices", "iterations", "converged", "J", "unit_L2_rel", "unit_H1_rel"], rows)


def run_study(cfg, log):
    from .analysis import MeshPolicy, convergence_study, write_curves, write_study_csv, write_timings
    from .cgm import CgmConfig
    from .functional import FunctionalConfig

    model = cfg.refraction_model
    rows = convergence_study(
        shapes=(cfg["shape"],),
        j_values=cfg["j"],
        k_values=cfg["k"],
        R_values=cfg["R"],
        refraction=model,
        policy=MeshPolicy(cfg["h"], cfg["inner_h"]),
        functional=FunctionalConfig(weighted=cfg["weighted"]),
        cgm=CgmConfig(cfg["epsilon"], cfg["max_iterations"]),
        outer_kind=cfg["outer"],
        r_hat=cfg["r_hat"],
        R_ref=cfg["R_ref"],
        progress=lambda r: log(f"study {r.shape} j={r.j} k={r.k:g} R={r.R:g}: L2_rel={r.unit.L2_rel:.4g} H1_rel={r.unit.H1_rel:.4g}"),
    )
    write_study_csv(rows, _out(cfg, "study.csv"))
    write_timings(rows, _out(cfg, "timings.csv"))
    write_curves(rows, _out(cfg, "curves"))


def run_exact(cfg, log):
    from .exact import ModeSolution

    R = max(cfg["R"])
    r = np.linspace(cfg["r_hat"], R, cfg["n_r"])
    t = 2 * np.pi * np.arange(cfg["n_theta"]) / cfg["n_theta"]
    rr, tt = np.meshgrid(r, t, indexing="ij")
    pts = np.stack([rr * np.cos(tt), rr * np.sin(tt)], axis=-1).reshape(-1, 2)
    rows = []
    for j in cfg["j"]:
        for k in cfg["k"]:
            u = ModeSolution(j, k, cfg["r_hat"])(pts)
            for (x, y), ri, ti, val in zip(pts, rr.ravel(), tt.ravel(), u):
                rows.append([j, _num(k), _num(ri), _num(ti), _num(x), _num(y), _num(val.real), _num(val.imag)])
    _write_csv(_out(cfg, "exact.csv"), ["j", "k", "r", "theta", "x", "y", "re", "im"], rows)
    log(f"exact: {len(rows)} samples")


def run_mesh(cfg, log):
    from .geometry import mesh_quality, write_mesh

    for R in cfg["R"]:
        mesh = _mesh(cfg, R)
        q = mesh_quality(mesh)
        path = _out(cfg, f"mesh_{cfg['shape']}_R{R:g}.txt")
        tmp = path + ".partial"
        write_mesh(mesh, tmp)
        os.replace(tmp, path)
        log(f"mesh R={R:g}: {mesh.n_vertices} vertices, {q.triangle_count} triangles, min angle {q.min_angle:.2f}, max edge {q.max_edge:.4g}")


def run_scan(cfg, log):
    from .analysis import MeshPolicy, divergence_scan, write_scan_csv
    from .cgm import CgmConfig

    curves = divergence_scan(
        a_values=cfg["a"],
        R_values=cfg["R"],
        k=cfg["k"][0],
        j=cfg["j"][0],
        policy=MeshPolicy(cfg["h"], cfg["inner_h"]),
        cgm=CgmConfig(cfg["epsilon"], cfg["max_iterations"]),
        r_hat=cfg["r_hat"],
        progress=lambda a, R, run: log(f"scan a={a:g} R={R:g}: J = {run.J:.6g}"),
    )
    write_scan_csv(curves, _out(cfg, "scan.csv"))
    _write_csv(
        _out(cfg, "classification.csv"),
        ["a", "growth", "classification"],
        [[_num(c.a), _num(c.growth), "bounded" if c.bounded else "growing"] for c in curves],
    )


RUNNERS = {"solve": run_solve, "study": run_study, "exact": run_exact, "mesh": run_mesh, "scan": run_scan}


def run(cfg, log=None):
    log = log or (lambda msg: print(msg, file=sys.stderr))
    RUNNERS[cfg.command](cfg, log)
    return 0


# ------------------------------------------------------------------ entry


def _split_flags(tokens):
    """Turn ``--key value`` pairs into a dict; ``--trace`` is a bare switch."""
    out, i = {}, 0
    while i < len(tokens):
        tok = tokens[i]
        if not tok.startswith("--"):
            raise ParseError(f"unexpected argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, value = key.split("=", 1)
            i += 1
        elif i + 1 < len(tokens):
            value = tokens[i + 1]
            i += 2
        else:
            raise ParseError(f"--{key} needs a value")
        out[key] = value
    return out


def build_parser():
    p = argparse.ArgumentParser(
        prog="helm-open",
        description="Helmholtz exterior solver with a minimized radiation functional.",
        epilog="config keys (also accepted as --key value): " + ", ".join(KEYS),
        allow_abbrev=False,
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--trace", action="store_true", help="write per-iteration CG history")
    p.add_argument("--out", default=".", help="output directory")
    return p


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args, rest = parser.parse_known_args(argv)
    try:
        text = ""
        if args.config:
            with open(args.config) as fh:
                text = fh.read()
        cfg = parse_config(args.command, text, _split_flags(rest), args.trace, args.out, args.config or "<config>")
        threads = os.environ.get("HELM_THREADS")
        if threads:
            from threadpoolctl import threadpool_limits

            with threadpool_limits(limits=int(threads)):
                return run(cfg)
        return run(cfg)
    except (HelmOpenError, OSError) as exc:
        print(f"helm-open {args.command}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
