"""Command-line front end.

Precedence for every setting: command-line flag, then the JSON config file
given with ``--config``, then the built-in default.  Outputs are computed
first and written at the end, each through a temporary file and a rename,
so a failing run leaves nothing behind.

Exit codes: 0 success, 1 other library error, 2 invalid configuration,
3 numerical non-convergence, 4 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time
from decimal import Decimal
from pathlib import Path
from typing import Iterable, Sequence

import jsonschema
import numpy as np

from . import groups, lab, thermo
from .errors import BudgetExceeded, ConfigError, EmptySeries, NonConvergent, SpiralisError
from .hypcore import Isometry, translation_length

CONFIG_SCHEMA_ID = "spiralis/config/1"
COMMANDS = ("orbit", "delta", "delta0", "dimension", "shadowcheck", "khintchine", "loglaw", "cf")

_positive = {"type": "number", "exclusiveMinimum": 0}
_number_list = {"type": "array", "items": {"type": "number"}, "minItems": 1}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["schema", "group"],
    "properties": {
        "schema": {"const": CONFIG_SCHEMA_ID},
        "group": {"type": "string"},
        "potential": {"type": "string"},
        "gamma0": {"oneOf": [{"type": "string"},
                             {"type": "array", "items": {"type": "integer"},
                              "minItems": 4, "maxItems": 4}]},
        "seed": {"type": "integer", "minimum": 0},
        "experiment": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": list(COMMANDS)},
                "tmin": {"type": "number"},
                "tmax": _positive,
                "kappa": _positive,
                "samples": {"type": "integer", "minimum": 0},
                "phi": {"type": "string"},
                "schedule": _number_list,
                "eps0": _positive,
                "t_grid": _number_list,
                "digits": {"type": "array", "items": {"type": "integer", "minimum": 1},
                           "minItems": 1},
                "method": {"enum": ["cf", "geometric"]},
                "s": _positive,
                "x": {"type": "string"},
                "n": {"type": "integer", "minimum": 0},
                "gap_min": _positive,
                "shell_width": _positive,
            },
        },
        "budgets": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"ball_radius": _positive, "elements": _positive, "seconds": _positive},
        },
        "outputs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"dir": {"type": "string"}, "plot": {"type": "boolean"}},
        },
    },
}

REPORT_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["schema", "kind", "settings", "thresholds", "samples", "summary", "verdict"],
    "properties": {
        "schema": {"const": lab.SCHEMA},
        "kind": {"type": "string"},
        "settings": {"type": "object"},
        "thresholds": {"type": "object"},
        "samples": {"type": "array", "items": {"type": "object"}},
        "summary": {"type": "object"},
        "verdict": {"type": ["string", "null"]},
    },
}

DEFAULTS = {
    "group": "psl2z",
    "potential": "zero",
    "gamma0": "golden",
    "seed": 0,
}

EXPERIMENT_DEFAULTS = {
    "orbit": {"tmax": 8.0, "gap_min": 0.01},
    "delta": {"tmin": 6.0, "tmax": 12.0, "kappa": 0.5},
    "delta0": {},
    "dimension": {"tmax": 12.0, "samples": 50, "shell_width": 1.0},
    "shadowcheck": {"tmax": 12.0, "s": 1.05},
    "khintchine": {"samples": 200, "phi": "powerlog:1", "schedule": [6.0, 8.0, 10.0, 12.0]},
    "loglaw": {"samples": 200, "eps0": 0.5, "method": "cf",
               "digits": [10_000, 100_000, 1_000_000], "t_grid": [5.0, 10.0, 15.0]},
    "cf": {"x": "golden", "n": 30},
}


# --- output helpers --------------------------------------------------------

def fmt(v) -> str:
    """CSV cell: integers verbatim, floats with 12 significant digits."""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".12g")
    return str(v)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _umask() -> int:
    mask = os.umask(0)
    os.umask(mask)
    return mask


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        # mkstemp creates 0600; give the file the permissions open() would
        os.chmod(tmp, 0o666 & ~_umask())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _svg_num(v: float) -> str:
    return format(round(float(v), 3), ".3f").rstrip("0").rstrip(".")


def svg_plot(series, caption: str = "", xlabel: str = "", ylabel: str = "") -> str:
    """Minimal line plot.  ``series`` is a sequence of (x, y) pairs."""
    pts = [(float(x), float(y)) for x, y in series if math.isfinite(x) and math.isfinite(y)]
    if not pts:
        raise EmptySeries("nothing to plot")
    W, H, m = 480, 320, 48
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1

    def sx(x):
        return m + (x - x0) / (x1 - x0) * (W - 2 * m)

    def sy(y):
        return H - m - (y - y0) / (y1 - y0) * (H - 2 * m)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
           f'viewBox="0 0 {W} {H}">',
           f'<rect width="{W}" height="{H}" fill="white"/>',
           f'<line x1="{m}" y1="{H - m}" x2="{W - m}" y2="{H - m}" stroke="black"/>',
           f'<line x1="{m}" y1="{m}" x2="{m}" y2="{H - m}" stroke="black"/>']
    for v, anchor in ((x0, "start"), (x1, "end")):
        out.append(f'<text x="{_svg_num(sx(v))}" y="{H - m + 16}" font-size="11" '
                   f'text-anchor="{anchor}">{fmt(v)}</text>')
    for v in (y0, y1):
        out.append(f'<text x="{m - 4}" y="{_svg_num(sy(v))}" font-size="11" '
                   f'text-anchor="end">{fmt(v)}</text>')
    if len(pts) > 1:
        path = " ".join(f"{_svg_num(sx(x))},{_svg_num(sy(y))}" for x, y in pts)
        out.append(f'<polyline points="{path}" fill="none" stroke="steelblue" stroke-width="1.5"/>')
    for x, y in pts:
        out.append(f'<circle cx="{_svg_num(sx(x))}" cy="{_svg_num(sy(y))}" r="2.5" '
                   f'fill="steelblue"/>')
    out.append(f'<text x="{W // 2}" y="{H - 8}" font-size="12" text-anchor="middle">'
               f'{_escape(xlabel)}</text>')
    out.append(f'<text x="12" y="{H // 2}" font-size="12" text-anchor="middle" '
               f'transform="rotate(-90 12 {H // 2})">{_escape(ylabel)}</text>')
    out.append(f'<text x="{W // 2}" y="20" font-size="13" text-anchor="middle">'
               f'{_escape(caption)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def emit_plot(series, path, caption: str = "", xlabel: str = "", ylabel: str = "") -> None:
    atomic_write(path, svg_plot(series, caption, xlabel, ylabel))


def report_json(report: lab.ExperimentReport) -> str:
    text = report.to_json()
    jsonschema.validate(json.loads(text), REPORT_SCHEMA)
    return text


# --- configuration ---------------------------------------------------------

def parse_gamma0(value) -> Isometry:
    if isinstance(value, (list, tuple)):
        entries = value
    else:
        text = str(value).strip().lower()
        if text == "golden":
            return lab.GOLDEN
        try:
            entries = [int(v) for v in text.split(",")]
        except ValueError as exc:
            raise ConfigError(f"bad gamma0 {value!r}") from exc
    if len(entries) != 4:
        raise ConfigError("gamma0 needs four integer entries")
    try:
        return Isometry(*entries)
    except (ValueError, ArithmeticError) as exc:
        raise ConfigError(f"bad gamma0 {value!r}: {exc}") from exc


def load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    validate_config(cfg)
    return cfg


def validate_config(cfg: dict) -> None:
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "top level"
        raise ConfigError(f"invalid config at {where}: {exc.message}") from exc


_FLAG_TO_KEY = {"tmin": "tmin", "tmax": "tmax", "kappa": "kappa", "samples": "samples",
                "phi": "phi", "eps0": "eps0", "method": "method", "s": "s", "x": "x", "n": "n",
                "gap_min": "gap_min", "shell_width": "shell_width"}


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad number list {text!r}") from exc


def merge_config(command: str, args: argparse.Namespace) -> dict:
    """Combine flags, the config file and defaults into one validated config."""
    if args.config:
        cfg = load_config(args.config)
    else:
        cfg = {"schema": CONFIG_SCHEMA_ID, "group": DEFAULTS["group"]}
    exp = dict(cfg.get("experiment", {}))
    if exp.get("kind", command) != command:
        raise ConfigError(f"config describes a {exp['kind']!r} experiment, not {command!r}")
    exp["kind"] = command
    for key in ("group", "potential", "seed"):
        if getattr(args, key, None) is not None:
            cfg[key] = getattr(args, key)
    gamma0 = args.gamma0 if args.gamma0 is not None else args.preset
    if gamma0 is not None:
        cfg["gamma0"] = gamma0
    for flag, key in _FLAG_TO_KEY.items():
        v = getattr(args, flag, None)
        if v is not None:
            exp[key] = v
    if getattr(args, "schedule", None):
        exp["schedule"] = _floats(args.schedule)
    if getattr(args, "t_grid", None):
        exp["t_grid"] = _floats(args.t_grid)
    if getattr(args, "digits", None):
        exp["digits"] = [int(v) for v in _floats(args.digits)]
    cfg["experiment"] = exp
    outputs = dict(cfg.get("outputs", {}))
    if args.out is not None:
        outputs["dir"] = args.out
    if args.plot:
        outputs["plot"] = True
    cfg["outputs"] = outputs
    validate_config(cfg)
    for key, v in DEFAULTS.items():
        cfg.setdefault(key, v)
    for key, v in EXPERIMENT_DEFAULTS[command].items():
        exp.setdefault(key, v)
    outputs.setdefault("dir", ".")
    outputs.setdefault("plot", False)
    return cfg


class Run:
    """Parsed configuration plus the budget clock."""

    def __init__(self, cfg: dict):
        self.cfg = cfg
        self.exp = cfg["experiment"]
        try:
            self.group = groups.GroupSpec.parse(cfg["group"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        self.gamma0 = parse_gamma0(cfg["gamma0"])
        self.potential = thermo.parse_potential(cfg["potential"], self.gamma0)
        self.seed = int(cfg["seed"])
        budgets = cfg.get("budgets", {})
        self.r_max = budgets.get("ball_radius")
        self.cap = int(budgets.get("elements", groups.DEFAULT_ELEMENT_CAP))
        self.seconds = budgets.get("seconds")
        self.start = time.monotonic()
        self.out = Path(cfg["outputs"]["dir"])
        self.plot = bool(cfg["outputs"]["plot"])
        self.files: dict[str, str] = {}

    def check_clock(self):
        if self.seconds is not None and time.monotonic() - self.start > self.seconds:
            raise BudgetExceeded(f"time budget of {self.seconds:g} s exceeded")

    def ball(self, R: float) -> groups.Orbit:
        orbit = groups.enumerate_ball(self.group, R, cap=self.cap, r_max=self.r_max)
        self.check_clock()
        return orbit

    def add(self, name: str, text: str):
        self.files[name] = text

    def add_plot(self, name: str, series, caption, xlabel, ylabel):
        if self.plot:
            self.add(name, svg_plot(series, caption, xlabel, ylabel))

    def commit(self):
        self.check_clock()
        for name in sorted(self.files):
            atomic_write(self.out / name, self.files[name])


# --- subcommands -------------------------------------------------------------

def cmd_orbit(run: Run) -> str:
    R = float(run.exp["tmax"])
    orbit = run.ball(R)
    run.add("orbit.csv", csv_text(
        ["a", "b", "c", "d", "displacement", "trace"],
        ([*row, d, tr] for row, d, tr in zip(orbit.entries.tolist(), orbit.displacement,
                                               orbit.trace))))
    t = np.arange(0.5, R + 1e-9, 0.5)
    counts = np.searchsorted(orbit.displacement, t, side="right")
    run.add_plot("orbit.svg", [(a, math.log(c)) for a, c in zip(t, counts) if c > 0],
                 f"orbit growth, {run.group}", "radius", "ln count")
    msg = f"orbit: {len(orbit)} elements of {run.group} with displacement <= {R:g}"
    if run.cfg.get("gamma0") is not None and run.group.kind != "quaternion" and \
            "gap_min" in run.exp and run.gamma0.integral:
        pts = groups.orbit_quadratic_irrationals(run.group, run.gamma0, (0.0, 1.0),
                                                 float(run.exp["gap_min"]))
        run.add("quadratic_irrationals.csv", csv_text(
            ["P", "Q", "Delta", "value", "conjugate", "height"],
            ([p.exact.P, p.exact.Q, p.exact.Delta, p.value, p.conjugate, p.height]
             if p.exact is not None else ["", "", "", p.value, p.conjugate, p.height]
             for p in pts)))
        msg += f"; {len(pts)} orbit points of gamma0 in [0, 1]"
    return msg


def fit_csv(fit: thermo.ExponentFit) -> str:
    text = csv_text(["t", "shell_sum", "ln_shell_sum"], fit.rows())
    return text + csv_text(["delta_hat", "stderr"], [[fit.delta, fit.stderr]])


def cmd_delta(run: Run) -> str:
    t0, t1, kappa = float(run.exp["tmin"]), float(run.exp["tmax"]), float(run.exp["kappa"])
    orbit = run.ball(t1)
    fit = thermo.critical_exponent(orbit, run.potential, (t0, t1), kappa)
    run.add("delta_fit.csv", fit_csv(fit))
    run.add_plot("delta_fit.svg", [(r[0], r[2]) for r in fit.rows()],
                 f"shell sums, {run.group}, F = {run.potential}", "t", "ln shell sum")
    return f"delta_hat={fit.delta:.6f} stderr={fit.stderr:.6f}"


def cmd_delta0(run: Run) -> str:
    g = run.gamma0
    fwd, bwd = thermo.period(run.potential, g), thermo.period(run.potential, g.inverse())
    ell = translation_length(g)
    # clear rounding noise (and negative zero) from the printed summary
    d0 = round(thermo.delta0_cyclic(run.potential, g), 12) + 0.0
    run.add("delta0.csv", csv_text(["a", "b", "c", "d", "length", "period", "period_inverse",
                                    "delta0"], [[*g.entries, ell, fwd, bwd, d0]]))
    return f"delta0={d0:.6f} length={ell:.6f}"


def cmd_dimension(run: Run) -> str:
    T = float(run.exp["tmax"])
    orbit = run.ball(T)
    fit = thermo.critical_exponent(orbit, run.potential, (max(T - 6.0, 1.0), T), 0.5)
    F = run.potential
    measure = thermo.patterson_empirical(orbit, F, fit.delta, T,
                                         shell_width=float(run.exp["shell_width"]))
    n = int(run.exp["samples"])
    if n < 2:
        raise ConfigError("dimension needs at least 2 sample points")
    pts = lab.sample_boundary(lab.Empirical(measure), n, run.seed)
    local = [thermo.local_dimension(measure, xi) for xi in pts]
    gibbs = thermo.gibbs_dimension(fit.delta, F, pts)
    run.add("measure.csv", csv_text(["xi", "weight"], zip(measure.xi, measure.weights)))
    run.add("dimension.csv", csv_text(["xi", "local_dimension"], zip(pts, local)))
    mean_local = float(np.mean(local))
    return (f"delta_hat={fit.delta:.6f} gibbs_dimension={gibbs.value:.6f} "
            f"local_dimension={mean_local:.6f}")


def cmd_shadowcheck(run: Run) -> str:
    T, s = float(run.exp["tmax"]), float(run.exp["s"])
    orbit = run.ball(T)
    measure = thermo.patterson_empirical(orbit, run.potential, s, T)
    lo, hi = 5.0, min(9.0, T - 2.0)
    idx = np.flatnonzero((orbit.displacement >= lo) & (orbit.displacement <= hi))
    ratios = thermo.mohsen_ratios(measure, orbit, (lo, hi))
    band = thermo.fitted_band(ratios)
    run.add("shadow_ratios.csv", csv_text(
        ["a", "b", "c", "d", "displacement", "ratio"],
        ([*orbit.entries[i].tolist(), orbit.displacement[i], r] for i, r in zip(idx, ratios))))
    run.add_plot("shadow_ratios.svg",
                 [(orbit.displacement[i], math.log(r)) for i, r in zip(idx, ratios)],
                 "shadow ratios", "displacement", "ln ratio")
    return (f"ratios={len(ratios)} band_c={band.c:.4f} centre={band.centre:.4f} "
            f"raw={band.raw:.4f}")


def cmd_khintchine(run: Run) -> str:
    phi = lab.parse_phi(run.exp["phi"])
    F = run.potential
    measure = None
    gap = None
    if F.tubes:
        orbit = run.ball(12.0)
        fit = thermo.critical_exponent(orbit, F, (6.0, 12.0), 0.5)
        measure = thermo.patterson_empirical(orbit, F, fit.delta, 12.0, shell_width=1.0)
        gap = fit.delta - thermo.delta0_cyclic(F, run.gamma0)
    elif run.group.kind != "quaternion":
        # lattices have delta = 1 + c and delta0 = c for constant F
        gap = 1.0
    report = lab.khintchine_experiment(run.group, run.gamma0, phi, F, int(run.exp["samples"]),
                                       run.exp["schedule"], run.seed, measure=measure,
                                       delta_gap=gap)
    run.check_clock()
    run.add("khintchine.json", report_json(report))
    sched = report.settings["H_schedule"]
    run.add("khintchine_samples.csv", csv_text(
        ["index", "x", *[f"min_R{fmt(r)}" for r in sched]],
        ([s["index"], s["x"], *s["running_min"]] for s in report.samples)))
    if report.samples:
        run.add_plot("khintchine.svg", list(zip(sched, report.summary["median"])),
                     f"median running minimum, {phi}", "radius", "statistic")
    return f"khintchine: verdict={report.verdict} samples={len(report.samples)}"


def cmd_loglaw(run: Run) -> str:
    method = run.exp["method"]
    report = lab.loglaw_experiment(run.group, run.gamma0, run.potential,
                                   float(run.exp["eps0"]), run.exp["t_grid"],
                                   int(run.exp["samples"]), run.seed, method,
                                   run.exp["digits"])
    run.check_clock()
    run.add("loglaw.json", report_json(report))
    if report.samples:
        marks = report.settings.get("digit_marks") or report.settings.get("t_grid")
        run.add("loglaw_samples.csv", csv_text(
            ["index", *[f"stat_{fmt(m)}" for m in marks]],
            ([s["index"], *s["statistic"]] for s in report.samples)))
        run.add_plot("loglaw.svg", [(math.log(m), v) for m, v in
                                    zip(marks, report.summary["median"])],
                     f"log law, {method} path", "ln n" if method == "cf" else "ln t", "median")
    return f"loglaw: verdict={report.verdict} samples={len(report.samples)}"


def parse_x(text: str):
    t = text.strip().lower()
    if t == "golden":
        return groups.QuadraticIrrational(-1, 2, 5)
    if t in ("sqrt2-1", "silver"):
        return groups.QuadraticIrrational(-2, 2, 8)
    try:
        value = Decimal(t)
    except ArithmeticError as exc:
        raise ConfigError(f"bad number {text!r}") from exc
    if not 0 < value < 1:
        raise ConfigError(f"x must lie in ]0, 1[, got {text!r}")
    return t


def cmd_cf(run: Run) -> str:
    x = parse_x(run.exp["x"])
    n = int(run.exp["n"])
    digits = lab.cf_digits(x, n)
    runs = lab.cf_fast_penetrations(digits) if digits else []
    run.add("cf_digits.csv", csv_text(["index", "digit"], enumerate(digits, 1)))
    run.add("cf_runs.csv", csv_text(["position", "length", "time", "duration"], runs))
    head = " ".join(str(a) for a in digits[:20]) + (" ..." if len(digits) > 20 else "")
    return f"cf: digits {head}; runs of 1's: {len(runs)}, longest {lab.longest_run(digits)}"


HANDLERS = {"orbit": cmd_orbit, "delta": cmd_delta, "delta0": cmd_delta0,
            "dimension": cmd_dimension, "shadowcheck": cmd_shadowcheck,
            "khintchine": cmd_khintchine, "loglaw": cmd_loglaw, "cf": cmd_cf}


# --- argument parsing --------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its values")
    common.add_argument("--group", help="psl2z | congruence:N | quaternion:a,b")
    common.add_argument("--potential", help="zero | const:c | tube:K")
    common.add_argument("--gamma0", help="a,b,c,d or golden")
    common.add_argument("--preset", help="named gamma0, same as --gamma0")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output directory (default: current directory)")
    common.add_argument("--plot", action="store_true", help="also write SVG plots")

    parser = _Parser(prog="spiralis", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_, *flags):
        p = sub.add_parser(name, parents=[common], help=help_)
        for f in flags:
            if f == "tmin":
                p.add_argument("--tmin", type=float, help="first shell start")
            elif f == "tmax":
                p.add_argument("--tmax", type=float, help="ball radius / depth")
            elif f == "kappa":
                p.add_argument("--kappa", type=float, help="shell width")
            elif f == "samples":
                p.add_argument("--samples", type=int)
            elif f == "phi":
                p.add_argument("--phi", help="powerlog:s | power:eps")
            elif f == "schedule":
                p.add_argument("--schedule", help="comma-separated radii")
            elif f == "eps0":
                p.add_argument("--eps0", type=float, help="tube radius")
            elif f == "method":
                p.add_argument("--method", choices=["cf", "geometric"])
            elif f == "t_grid":
                p.add_argument("--t-grid", dest="t_grid", help="comma-separated times")
            elif f == "digits":
                p.add_argument("--digits", help="comma-separated digit counts")
            elif f == "s":
                p.add_argument("--s", type=float, help="measure exponent")
            elif f == "gap_min":
                p.add_argument("--gap-min", dest="gap_min", type=float)
            elif f == "shell_width":
                p.add_argument("--shell-width", dest="shell_width", type=float)
            elif f == "x":
                p.add_argument("--x", help="number in ]0,1[: decimal, golden or sqrt2-1")
            elif f == "n":
                p.add_argument("--n", type=int, help="number of digits")
        return p

    add("orbit", "enumerate a ball of group elements", "tmax", "gap_min")
    add("delta", "critical exponent from orbit shells", "tmin", "tmax", "kappa")
    add("delta0", "pressure of the closed geodesic of gamma0")
    add("dimension", "Gibbs versus local dimension of the Patterson measure",
        "tmax", "samples", "shell_width")
    add("shadowcheck", "shadow-lemma ratios of the empirical Patterson measure", "tmax", "s")
    add("khintchine", "Khintchine-type approximation experiment", "phi", "samples", "schedule")
    add("loglaw", "logarithm law for tube penetrations", "samples", "eps0", "method",
        "t_grid", "digits")
    add("cf", "continued fraction digits and runs of 1's", "x", "n")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = merge_config(args.command, args)
        run = Run(cfg)
        message = HANDLERS[args.command](run)
        run.commit()
    except ConfigError as exc:
        print(f"spiralis: configuration error: {exc}", file=sys.stderr)
        return 2
    except NonConvergent as exc:
        print(f"spiralis: no convergence: {exc}", file=sys.stderr)
        return 3
    except BudgetExceeded as exc:
        print(f"spiralis: budget exceeded: {exc}", file=sys.stderr)
        return 4
    except SpiralisError as exc:
        print(f"spiralis: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(message)
    return 0


if __name__ == "__main__":
    sys.exit(main())
