"""Command-line front end.

    xp2 <trajectory|phase|spectrum|discrepancy|potentials|wavefunction> [flags]

Every subcommand writes a CSV (or JSON) table to ``--out`` or stdout and can
render an SVG figure with ``--svg``. Exit codes: 0 success, 1 solver failure,
2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from xp2 import classical, schrodinger, semiclassical
from xp2.errors import DomainError, XP2Error
from xp2.model import EnergyPoint, ModelParams, QuantForm
from xp2.quantum import (
    OscillatorBasisConfig,
    ShootingConfig,
    spectrum_matrix,
    spectrum_shooting,
    wavefunction_matrix,
    wavefunction_shooting,
)

BACKENDS = ("shooting", "matrix", "fd", "mathieu", "semiclassical")
SUBCOMMANDS = ("trajectory", "phase", "spectrum", "discrepancy", "potentials", "wavefunction")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    a: float = 1.0
    hbar: float = 1.0
    energy: float = 3.0
    forms: list[QuantForm] = field(default_factory=list)
    levels: tuple[int, int] | None = None
    backends: list[str] = field(default_factory=list)
    semiclassical: bool = False
    compare: bool = False
    samples: int | None = None
    out: str | None = None
    fmt: str = "csv"
    svg: str | None = None
    x_max: float | None = None
    u_max: float | None = None
    basis_size: int | None = None
    grid_points: int | None = None
    ode_tol: float = 1e-11

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.a, self.hbar)


# -- formatting ---------------------------------------------------------------------

def fmt_float(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.9g" % v
    return str(v)


def _json_value(v):
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return None if not math.isfinite(v) else float("%.9g" % v)
    return v


def render(columns, rows, fmt: str) -> str:
    if fmt == "json":
        data = [{c: _json_value(v) for c, v in zip(columns, row)} for row in rows]
        return json.dumps(data, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt_float(v) for v in row])
    return buf.getvalue()


def emit(cfg: RunConfig, columns, rows):
    text = render(columns, rows, cfg.fmt)
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands --------------------------------------------------------------------

def cmd_trajectory(cfg: RunConfig):
    params = cfg.params
    ep = EnergyPoint.from_e(params, cfg.energy)
    if ep.e == 0:
        raise DomainError("trajectory needs --energy > 0")
    n = cfg.samples or 1000
    t = np.linspace(0.0, classical.period(params, ep), n)
    x, p = classical.trajectory(params, ep, t)
    resid = classical.hamiltonian(params, x, p) - ep.h_e
    emit(cfg, ["t", "x", "p", "H_residual"], zip(t, x, p, resid))
    if cfg.svg:
        from xp2 import plotting
        plotting.line_plot(cfg.svg, t, {"x(t)": x, "p(t)": p}, "t", "x, p",
                           f"a={params.a:g}, E={ep.e:g}")


def cmd_phase(cfg: RunConfig):
    params = cfg.params
    ep = EnergyPoint.from_e(params, cfg.energy)
    n = cfg.samples or 1001
    # sine spacing concentrates samples at the vertical tangents x = +-E/a
    turning = ep.e / params.a
    x = turning * np.sin(np.linspace(-0.5 * math.pi, 0.5 * math.pi, n))
    p = classical.phase_boundary(params, ep, x)
    emit(cfg, ["x", "p_plus", "p_minus"], zip(x, p, -p))
    if cfg.svg:
        from xp2 import plotting
        plotting.phase_plot(cfg.svg, x, p, -p, f"a={params.a:g}, E={ep.e:g}")


def _level_range(cfg, default):
    return cfg.levels or default


def _compute(form: QuantForm | None, backend: str, cfg: RunConfig, lo: int, hi: int):
    params = cfg.params
    if backend == "semiclassical":
        return semiclassical.semiclassical_levels(params, semiclassical.SemiclassicalConfig(),
                                                  hi, lo)
    if backend == "shooting":
        sc = ShootingConfig(x_max=cfg.x_max, ode_tol=cfg.ode_tol)
        return spectrum_shooting(form, params, hi, sc, n_min=lo)
    if backend == "matrix":
        size = cfg.basis_size or max(400, 16 * hi)
        return spectrum_matrix(form, params, OscillatorBasisConfig(size), hi, n_min=lo)
    if backend == "fd":
        grid = None
        if cfg.u_max is not None or cfg.grid_points is not None:
            auto = schrodinger.GridSpec.for_levels(params, hi)
            u_max = cfg.u_max or auto.u_max
            n = cfg.grid_points or int(math.ceil(2 * u_max / schrodinger.FD_STEP)) - 1
            grid = schrodinger.GridSpec(u_max, n)
        return schrodinger.spectrum_fd(form, params, grid, hi).select(lo, hi)
    if backend == "mathieu":
        if form is not QuantForm.II:
            raise UsageError("the mathieu backend applies to form 2 only")
        return schrodinger.spectrum_mathieu(params, hi, cfg.u_max or 12.0).select(lo, hi)
    raise UsageError(f"unknown backend {backend!r}")


def cmd_spectrum(cfg: RunConfig):
    lo, hi = _level_range(cfg, (1, 10))
    only_semi = cfg.semiclassical and not cfg.forms and not cfg.backends
    jobs = []
    if not only_semi:
        backends = [b for b in (cfg.backends or ["shooting"]) if b != "semiclassical"]
        forms = cfg.forms or list(QuantForm)
        for form in forms:
            for backend in backends:
                if backend == "mathieu" and form is not QuantForm.II:
                    if cfg.forms:
                        raise UsageError("the mathieu backend applies to form 2 only")
                    continue
                jobs.append((form, backend))
    if cfg.semiclassical or "semiclassical" in cfg.backends:
        jobs.append((None, "semiclassical"))
    columns = ["form", "n", "parity", "E", "H_E", "residual", "backend"]
    if cfg.compare:
        columns.append("delta")
    rows, reference = [], {}
    for form, backend in jobs:
        spec = _compute(form, backend, cfg, lo, hi)
        label = form.label if form else "semiclassical"
        for lv in spec:
            row = [label, lv.n, lv.parity.value, lv.e, lv.h_e, lv.residual, backend]
            if cfg.compare:
                ref = reference.setdefault((label, lv.n), lv.e)
                row.append(lv.e - ref)
            rows.append(row)
    emit(cfg, columns, rows)
    if cfg.svg:
        from xp2 import plotting
        groups = {}
        for row in rows:
            key = f"{row[0]} {row[6]}"
            groups.setdefault(key, ([], []))
            groups[key][0].append(row[1])
            groups[key][1].append(row[3])
        plotting.scatter_plot(cfg.svg, groups, "n", "E")


def cmd_discrepancy(cfg: RunConfig):
    lo, hi = _level_range(cfg, (1, 20))
    backend = (cfg.backends or ["fd"])[0]
    if backend in ("semiclassical", "mathieu"):
        raise UsageError("discrepancy needs a backend that covers all forms")
    semi = _compute(None, "semiclassical", cfg, lo, hi)
    forms = cfg.forms or list(QuantForm)
    rows, groups = [], {}
    for form in forms:
        spec = _compute(form, backend, cfg, lo, hi)
        xs, ys = [], []
        for lv in spec:
            es = semi.by_n(lv.n).e
            rows.append([lv.n, form.label, lv.e, es, lv.e - es])
            xs.append(lv.n)
            ys.append(lv.e - es)
        groups[form.label] = (xs, ys)
    emit(cfg, ["n", "form", "E", "E_semiclassical", "discrepancy"], rows)
    if cfg.svg:
        from xp2 import plotting
        plotting.scatter_plot(cfg.svg, groups, "n", "E_n - E_n(semiclassical)")


def cmd_potentials(cfg: RunConfig):
    nat = cfg.params.natural_units()
    u_max = cfg.u_max or 2.0
    n = cfg.samples or 401
    u = np.linspace(-u_max, u_max, n)
    vs = [schrodinger.potential(f, nat, u) for f in QuantForm]
    emit(cfg, ["u", "V1", "V2", "V3"], zip(u, *vs))
    if cfg.svg:
        from xp2 import plotting
        plotting.line_plot(cfg.svg, u, {f"V{f.value}(u)": v for f, v in zip(QuantForm, vs)},
                           "u", "V(u)", f"a={nat.a:g}")


def cmd_wavefunction(cfg: RunConfig):
    params = cfg.params
    form = cfg.forms[0] if cfg.forms else QuantForm.I
    lo, hi = _level_range(cfg, (1, 1))
    if lo != hi:
        raise UsageError("wavefunction takes a single level, e.g. --levels 3")
    backend = (cfg.backends or ["shooting"])[0]
    n = cfg.samples or 2001
    if backend == "mathieu":
        if form is not QuantForm.II:
            raise UsageError("the mathieu backend applies to form 2 only")
        level = schrodinger.spectrum_mathieu(params, hi).by_n(hi)
        u, phi = schrodinger.mathieu_wavefunction(params, level, cfg.u_max, n)
        columns, data, xlabel = ["u", "phi"], (u, phi), "u"
    elif backend == "shooting":
        sc = ShootingConfig(x_max=cfg.x_max, ode_tol=cfg.ode_tol)
        level = spectrum_shooting(form, params, hi, sc).by_n(hi)
        wf = wavefunction_shooting(form, params, level, sc, n)
        columns, data, xlabel = ["x", "psi"], (wf.x, wf.psi), "x"
    elif backend == "matrix":
        size = cfg.basis_size or max(400, 16 * hi)
        basis = OscillatorBasisConfig(size)
        spec, vecs = spectrum_matrix(form, params, basis, hi, vectors=True)
        extent = cfg.x_max or 12.0 / params.natural_units().a * math.sqrt(params.hbar)
        x = np.linspace(-extent, extent, n)
        psi = wavefunction_matrix(vecs[:, hi - 1], params, basis, x)
        ref = psi[np.argmax(np.abs(psi) * (x >= 0))]
        columns, data, xlabel = ["x", "psi"], (x, psi * np.sign(ref)), "x"
    else:
        raise UsageError(f"wavefunction does not support backend {backend!r}")
    emit(cfg, columns, zip(*data))
    if cfg.svg:
        from xp2 import plotting
        plotting.line_plot(cfg.svg, data[0], {f"{form.label} n={hi}": data[1]}, xlabel,
                           columns[1])


COMMANDS = {
    "trajectory": cmd_trajectory,
    "phase": cmd_phase,
    "spectrum": cmd_spectrum,
    "discrepancy": cmd_discrepancy,
    "potentials": cmd_potentials,
    "wavefunction": cmd_wavefunction,
}


# -- argument handling ----------------------------------------------------------------

def parse_levels(text: str) -> tuple[int, int]:
    try:
        if ".." in text:
            lo, hi = (int(s) for s in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad level range {text!r}; use n or lo..hi") from None
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad level range {text!r}")
    return lo, hi


def parse_forms(text: str) -> list[QuantForm]:
    try:
        return [QuantForm.parse(s) for s in text.split(",") if s.strip()]
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def parse_backends(text: str) -> list[str]:
    names = [s.strip().lower() for s in text.split(",") if s.strip()]
    for name in names:
        if name not in BACKENDS:
            raise argparse.ArgumentTypeError(f"unknown backend {name!r}; choose from {BACKENDS}")
    return names


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xp2", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--a", type=float, default=1.0, help="regulator a > 0")
        p.add_argument("--hbar", type=float, default=1.0)
        p.add_argument("--energy", type=float, default=3.0, help="energy label E")
        p.add_argument("--form", type=parse_forms, default=[], help="1, 2, 3 or a list")
        p.add_argument("--levels", type=parse_levels, default=None, help="n or lo..hi")
        p.add_argument("--backend", type=parse_backends, default=[],
                       help=",".join(BACKENDS))
        p.add_argument("--semiclassical", action="store_true")
        p.add_argument("--compare", action="store_true")
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--svg", default=None)
        p.add_argument("--config", default=None, help="key=value defaults file")
        p.add_argument("--x-max", type=float, default=None)
        p.add_argument("--u-max", type=float, default=None)
        p.add_argument("--basis-size", type=int, default=None)
        p.add_argument("--grid-points", type=int, default=None)
        p.add_argument("--ode-tol", type=float, default=1e-11)
    return parser


def _config_path(argv):
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


FLAG_KEYS = {"semiclassical", "compare"}
VALUE_KEYS = {"a", "hbar", "energy", "form", "levels", "backend", "samples", "out", "format",
              "svg", "x-max", "u-max", "basis-size", "grid-points", "ode-tol"}


def config_tokens(path: str) -> list[str]:
    """Turn a key=value file into flag tokens placed before the real arguments."""
    tokens = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("_", "-").lower()
            if key in FLAG_KEYS:
                if value.lower() in ("1", "true", "yes", "on"):
                    tokens.append(f"--{key}")
                elif value.lower() not in ("0", "false", "no", "off"):
                    raise UsageError(f"{path}:{lineno}: {key} expects true/false")
            elif key in VALUE_KEYS:
                tokens += [f"--{key}", value]
            else:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
    return tokens


def make_config(argv) -> RunConfig:
    parser = build_parser()
    argv = list(argv)
    path = _config_path(argv)
    if path is not None and argv and argv[0] in SUBCOMMANDS:
        try:
            argv = argv[:1] + config_tokens(path) + argv[1:]
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
    ns = parser.parse_args(argv)
    cfg = RunConfig(ns.command, ns.a, ns.hbar, ns.energy, ns.form, ns.levels, ns.backend,
                    ns.semiclassical, ns.compare, ns.samples, ns.out, ns.format, ns.svg,
                    ns.x_max, ns.u_max, ns.basis_size, ns.grid_points, ns.ode_tol)
    # validate before any computation starts
    cfg.params
    if cfg.samples is not None and cfg.samples < 2:
        raise UsageError("--samples must be at least 2")
    if cfg.energy < 0:
        raise UsageError("--energy must be >= 0")
    return cfg


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = make_config(argv)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)
    except (UsageError, DomainError) as exc:
        print(f"xp2: error: {exc}", file=sys.stderr)
        return 2
    try:
        COMMANDS[cfg.command](cfg)
    except (UsageError, DomainError) as exc:
        print(f"xp2: error: {exc}", file=sys.stderr)
        return 2
    except (XP2Error, ArithmeticError) as exc:
        print(f"xp2: solver failure: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
