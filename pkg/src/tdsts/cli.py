"""Command line front end: ``tdsts evaluate | density | validate | sweep``.

Exit codes: 0 success, 1 validation failure or I/O error, 2 invalid
configuration or arguments.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from typing import Iterable, Sequence

import numpy as np

from . import analytic as an
from . import config as cfg
from . import validation
from .model import StateSpec

EVALUATE_COLUMNS = (
    "t",
    "mean_x",
    "var_x",
    "mean_p",
    "var_p",
    "uncertainty_product",
    "entropy_sum",
    "dY1_sq",
    "dY2_sq",
)
PHOTON_COLUMNS = ("mean_n", "var_n", "g2")
DENSITY_KINDS = ("position", "momentum", "wavefunction", "rho")


def fmt(value) -> str:
    """17 significant digits; ``None`` (undefined g2) becomes the token ``undefined``."""
    if value is None:
        return "undefined"
    if isinstance(value, str):
        return value
    return format(float(value) + 0.0, ".17g")  # + 0.0 folds -0 into 0


def evaluate_row(spec: StateSpec, t: float) -> dict:
    m = an.xp_moments(spec, t)
    y1, y2 = an.quadrature_variances(spec, t, 0.0)
    return {
        "t": t,
        "mean_x": m.mean_x,
        "var_x": m.var_x,
        "mean_p": m.mean_p,
        "var_p": m.var_p,
        "uncertainty_product": an.uncertainty_product(spec, t),
        "entropy_sum": an.entropy_sum(spec, t),
        "dY1_sq": y1,
        "dY2_sq": y2,
    }


def photon_block(spec: StateSpec) -> dict:
    ps = an.photon_stats(spec)
    return {"mean_n": ps.mean_n, "var_n": ps.var_n, "g2": ps.g2}


# -- serialization -------------------------------------------------------------


def _json(value, indent: int = 0) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f'{pad}"{k}": {_json(v, indent + 1)}' for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        return "[\n" + ",\n".join(pad + _json(v, indent + 1) for v in value) + "\n" + end + "]"
    if value is None:
        return '"undefined"'
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    return fmt(value)


def render_csv(columns: Sequence[str], rows: Iterable[dict], comments: dict | None = None) -> str:
    buf = io.StringIO()
    for key, value in (comments or {}).items():
        buf.write(f"# {key}={fmt(value)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row[c]) for c in columns])
    return buf.getvalue()


def render(fmt_name: str, columns, rows, header: dict | None = None) -> str:
    rows = list(rows)
    if fmt_name == "csv":
        return render_csv(columns, rows, header)
    ordered = [{c: row[c] for c in columns} for row in rows]
    if header is None:
        return _json(ordered) + "\n"
    return _json({"photon_stats": header, "rows": ordered}) + "\n"


def write_output(text: str, path: str | None) -> None:
    """Write ``text`` to ``path`` atomically (temp file + rename), or to stdout."""
    if not path:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tdsts-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- commands ------------------------------------------------------------------


def _out(args, conf: cfg.RunConfig) -> tuple[str, str | None]:
    return args.format or conf.output_format, args.output or conf.output_path


def cmd_evaluate(args) -> int:
    conf = cfg.load(args.config)
    rows = [evaluate_row(conf.spec, t) for t in conf.times]
    kind, path = _out(args, conf)
    write_output(render(kind, EVALUATE_COLUMNS, rows, photon_block(conf.spec)), path)
    return 0


def density_rows(conf: cfg.RunConfig, kind: str) -> tuple[tuple[str, ...], list[dict]]:
    spec = conf.spec
    rows: list[dict] = []
    for t in conf.times:
        m = an.xp_moments(spec, t)
        gx = conf.x_grid
        xs = np.linspace(-gx.halfwidth_sigmas, gx.halfwidth_sigmas, gx.points) * math.sqrt(m.var_x) + m.mean_x
        if kind == "position":
            columns = ("t", "x", "density")
            rows += [{"t": t, "x": x, "density": d} for x, d in zip(xs, an.prob_x(spec, xs, t))]
        elif kind == "momentum":
            gp = conf.p_grid
            ps = np.linspace(-gp.halfwidth_sigmas, gp.halfwidth_sigmas, gp.points) * math.sqrt(m.var_p) + m.mean_p
            columns = ("t", "p", "density")
            rows += [{"t": t, "p": p, "density": d} for p, d in zip(ps, an.prob_p(spec, ps, t))]
        else:
            # the tilde-mode marginal has the same mean and width as the physical one
            other = "x_tilde" if kind == "wavefunction" else "x_prime"
            columns = ("t", "x", other, "re", "im")
            X, Y = np.meshgrid(xs, xs, indexing="ij")
            if kind == "wavefunction":
                vals = an.wavefunction(spec, X, Y, t)
            else:
                vals = an.rho_position(spec, Y, X, t)
            rows += [
                {"t": t, "x": x, other: y, "re": v.real, "im": v.imag}
                for x, y, v in zip(X.ravel(), Y.ravel(), vals.ravel())
            ]
    return columns, rows


def cmd_density(args) -> int:
    conf = cfg.load(args.config)
    columns, rows = density_rows(conf, args.kind)
    kind, path = _out(args, conf)
    write_output(render(kind, columns, rows), path)
    return 0


def cmd_validate(args) -> int:
    cases = None
    cutoff, quad = 60, 2001
    if args.config:
        conf = cfg.load(args.config)
        cases = tuple(validation.Case(conf.spec, t) for t in conf.times)
        cutoff, quad = conf.fock_cutoff, conf.quad_points
    else:
        env = os.environ.get("TDSTS_FOCK_CUTOFF")
        if env is not None:
            cutoff = cfg.RunConfig.from_dict({}).fock_cutoff
    opts = validation.SuiteOptions(
        seed=args.seed,
        draws=args.draws,
        cutoff=cutoff,
        quad_points=quad,
        cases=cases,
        faults=frozenset(args.inject_fault or ()),
    )
    criteria = args.only or list(validation.CRITERIA)
    results = validation.run_suite(opts, criteria)
    print(validation.format_table(results))
    failed = [r.name for r in results if not r.passed]
    if failed:
        print("FAILED: " + ", ".join(failed))
        return 1
    print("all checks passed")
    return 0


def _sweep_point(payload):
    raw, times = payload
    conf = cfg.RunConfig.from_dict(raw)
    photon = photon_block(conf.spec)
    return [{**evaluate_row(conf.spec, t), **photon} for t in times]


def cmd_sweep(args) -> int:
    conf = cfg.load(args.config)
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        raise cfg.ConfigError(f"--values must be a comma-separated list of numbers, got {args.values!r}") from None
    if not values:
        raise cfg.ConfigError("--values is empty")
    payloads = []
    for v in values:
        try:
            raw = cfg.with_axis(conf.raw, args.axis, v)
        except KeyError:
            raise cfg.ConfigError(f"unknown sweep axis {args.axis!r}") from None
        cfg.RunConfig.from_dict(raw)  # reject invalid values before any work
        payloads.append((raw, conf.times))

    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            blocks = list(pool.map(_sweep_point, payloads))
    else:
        blocks = [_sweep_point(p) for p in payloads]

    columns = (args.axis, *EVALUATE_COLUMNS, *PHOTON_COLUMNS)
    rows = [{args.axis: v, **row} for v, block in zip(values, blocks) for row in block]
    kind, path = _out(args, conf)
    write_output(render(kind, columns, rows), path)
    return 0


def _criterion(text: str) -> int:
    value = int(text)
    if value not in validation.CRITERIA:
        raise argparse.ArgumentTypeError(f"no check group {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tdsts", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def outputs(p):
        p.add_argument("-o", "--output", help="output file (default: config output.path or stdout)")
        p.add_argument("--format", choices=("csv", "json"), help="override config output.format")

    p = sub.add_parser("evaluate", help="moments, entropies and photon statistics over the time grid")
    p.add_argument("--config", required=True)
    outputs(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("density", help="probability densities, wavefunction or density matrix on a grid")
    p.add_argument("--config", required=True)
    p.add_argument("--kind", required=True, choices=DENSITY_KINDS)
    outputs(p)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("validate", help="closed forms against the numerical oracles")
    p.add_argument("--config", help="validate this state instead of seeded random draws")
    p.add_argument("--seed", type=int, default=validation.DEFAULT_SEED)
    p.add_argument("--draws", type=int, default=200, help="random states per check (default 200)")
    p.add_argument("--only", type=_criterion, action="append", metavar="N", help="run check group N only")
    p.add_argument("--inject-fault", action="append", metavar="CHECK", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sweep", help="evaluate over a list of values of one parameter")
    p.add_argument("--config", required=True)
    p.add_argument("--axis", required=True, help="r, phi, alpha.mod, alpha.arg, alpha.re, alpha.im, T1, T2, tau1, tau2, input_temps[i], detector_temps[i]")
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (output order is unaffected)")
    outputs(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except cfg.ConfigError as exc:
        print(f"tdsts: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"tdsts: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
