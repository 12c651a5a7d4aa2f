"""Command-line front end.

Subcommands compute exceptional (quasi-exactly-solved) points, rescaled
spectra, transformed-problem energy tables, algebraic root data, potential
tables, and run the verification suites.  Output is CSV or JSON data (no
plotting): UTF-8, LF line endings, comma separation, 12 significant digits,
stable column order.  File writes are atomic (temp file + rename).

Exit codes: 0 success, 1 verification/computation failure, 2 usage error.
A key=value config file (--config) supplies defaults; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import warnings
from pathlib import Path

import numpy as np

from .bethe import bethe_residuals, constraint_residual, solve_bethe, to_gaudin
from .constraint import qes_points
from .errors import DegenerateAtomicLimitWarning, RabiPtError
from .model import Branch, ModelParams, qes_energy, regular_spectrum, \
    rescaled_level
from .potentials import GaudinParams, PotentialForm, full_energy, \
    full_potential, gaudin_potential, gaudin_wavefunction, qes_wavefunction
from .verify import run_checks, summary_lines

__all__ = ["main", "entrypoint"]


class _UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# plumbing

def _fmt(v) -> str:
    return "%.12g" % float(v)


def _jnum(v) -> float:
    return float(_fmt(v)) + 0.0   # + 0.0 folds -0.0 into 0.0


def _jcomplex(z) -> dict:
    return {"re": _jnum(z.real), "im": _jnum(z.imag)}


def _csv_text(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(
            c if isinstance(c, str) else
            str(c) if isinstance(c, (int, np.integer)) else _fmt(c)
            for c in row))
    return "\n".join(lines) + "\n"


def _write_text(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=str(target.parent or Path(".")),
                               prefix=target.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_config(path) -> dict:
    if path is None:
        return {}
    cfg = {}
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _UsageError(f"cannot read config file: {exc}")
    for lineno, line in enumerate(raw.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise _UsageError(
                f"{path}:{lineno}: expected key=value, got {stripped!r}")
        key, _, value = stripped.partition("=")
        cfg[key.strip().replace("-", "_")] = value.strip()
    return cfg


def _cast_bool(token: str) -> bool:
    low = token.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {token!r}")


def _resolve(args, cfg: dict, spec) -> dict:
    """Merge CLI values (win), config values, then hard defaults."""
    out = {}
    known = {name for name, _, _ in spec}
    unknown = set(cfg) - known
    if unknown:
        raise _UsageError(
            f"unknown config keys: {', '.join(sorted(unknown))}")
    for name, default, cast in spec:
        cli_value = getattr(args, name)
        if cli_value is not None:
            out[name] = cli_value
        elif name in cfg:
            try:
                out[name] = cast(cfg[name])
            except ValueError as exc:
                raise _UsageError(f"config key {name}: {exc}")
        else:
            out[name] = default
    return out


_MODEL_SPEC = (
    ("delta", 1.2, float),
    ("epsilon", 0.3, float),
    ("omega", 1.0, float),
)


def _model_params(opts, g=0.0) -> ModelParams:
    return ModelParams(delta=opts["delta"], epsilon=opts["epsilon"],
                       omega=opts["omega"], g=g)


def _branches(token: str):
    if token == "both":
        return (Branch.PLUS, Branch.MINUS)
    return (Branch.parse(token),)


def _add_model_flags(sub):
    sub.add_argument("--delta", type=float, default=None,
                     help="level splitting (default 1.2)")
    sub.add_argument("--epsilon", type=float, default=None,
                     help="static asymmetry (default 0.3)")
    sub.add_argument("--omega", type=float, default=None,
                     help="oscillator frequency (default 1)")
    sub.add_argument("--config", default=None, metavar="FILE",
                     help="key=value defaults file; flags override")
    sub.add_argument("--output", default=None, metavar="PATH",
                     help="output file ('-' or absent: stdout)")


def _collect_points(params, n_max, branches):
    rows = []
    degenerate = False
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DegenerateAtomicLimitWarning)
        for n in range(1, n_max + 1):
            for branch in branches:
                rows.extend(qes_points(params, n, branch))
        degenerate = any(issubclass(w.category, DegenerateAtomicLimitWarning)
                         for w in caught)
    return rows, degenerate


# ---------------------------------------------------------------------------
# subcommands

def cmd_qes_points(args) -> int:
    spec = _MODEL_SPEC + (
        ("n_max", 5, int),
        ("branch", "both", str),
        ("format", "csv", str),
    )
    opts = _resolve(args, _load_config(args.config), spec)
    if opts["n_max"] < 1:
        raise _UsageError("--n-max must be at least 1")
    if opts["format"] not in ("csv", "json"):
        raise _UsageError("--format must be csv or json")
    params = _model_params(opts)
    points, degenerate = _collect_points(params, opts["n_max"],
                                         _branches(opts["branch"]))
    if degenerate:
        print("notice: delta = 0 degenerates the exceptional family "
              "(atomic-limit crossings at every coupling); no isolated "
              "points to report", file=sys.stderr)
    if opts["format"] == "csv":
        header = ["n", "branch", "g", "energy", "rescaled_energy",
                  "constraint_residual"]
        rows = [[p.n, str(p.branch), p.g, p.energy,
                 rescaled_level(p.energy, p.g, params.omega),
                 p.constraint_residual] for p in points]
        _write_text(args.output, _csv_text(header, rows))
    else:
        payload = [{
            "n": p.n, "branch": str(p.branch), "g": _jnum(p.g),
            "energy": _jnum(p.energy),
            "rescaled_energy": _jnum(rescaled_level(p.energy, p.g,
                                                    params.omega)),
            "constraint_residual": _jnum(p.constraint_residual),
        } for p in points]
        _write_text(args.output,
                    json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return 0


def _spectrum_table(params, g_values, levels, truncation):
    rows = []
    for g in g_values:
        sp = regular_spectrum(params.replace(g=float(g)), levels,
                              truncation=truncation)
        rows.append((float(g), sp.values))
    return rows


def cmd_spectrum(args) -> int:
    spec = _MODEL_SPEC + (
        ("g_min", 0.0, float),
        ("g_max", 1.0, float),
        ("steps", 101, int),
        ("levels", 6, int),
        ("truncation", 200, int),
    )
    opts = _resolve(args, _load_config(args.config), spec)
    if opts["steps"] < 1:
        raise _UsageError("--steps must be at least 1")
    if not opts["g_min"] < opts["g_max"]:
        raise _UsageError("--g-min must be below --g-max")
    if opts["levels"] < 1:
        raise _UsageError("--levels must be at least 1")
    params = _model_params(opts)
    gs = np.linspace(opts["g_min"], opts["g_max"], opts["steps"])
    header = ["g"] + ["level_%d" % i for i in range(opts["levels"])]
    rows = []
    for g, values in _spectrum_table(params, gs, opts["levels"],
                                     opts["truncation"]):
        rows.append([g] + [rescaled_level(E, g, params.omega)
                           for E in values])
    _write_text(args.output, _csv_text(header, rows))
    return 0


def cmd_pt_energies(args) -> int:
    spec = _MODEL_SPEC + (
        ("g_min", 0.0, float),
        ("g_max", 1.0, float),
        ("steps", 101, int),
        ("levels", 6, int),
        ("truncation", 200, int),
        ("branch", "both", str),
        ("n_max", 5, int),
    )
    opts = _resolve(args, _load_config(args.config), spec)
    if opts["steps"] < 1:
        raise _UsageError("--steps must be at least 1")
    if not opts["g_min"] < opts["g_max"]:
        raise _UsageError("--g-min must be below --g-max")
    params = _model_params(opts)
    branches = _branches(opts["branch"])
    gs = np.linspace(opts["g_min"], opts["g_max"], opts["steps"])
    header = ["g"] + ["calE_%s_%d" % (b, i)
                      for b in branches for i in range(opts["levels"])]
    rows = []
    for g, values in _spectrum_table(params, gs, opts["levels"],
                                     opts["truncation"]):
        p = params.replace(g=g)
        row = [g]
        for b in branches:
            row.extend(full_energy(p, E, b) for E in values)
        rows.append(row)
    main_csv = _csv_text(header, rows)

    points, _ = _collect_points(params, opts["n_max"], branches)
    mheader = ["n", "branch", "g", "calE"]
    mrows = [[p.n, str(p.branch), p.g,
              full_energy(params.replace(g=p.g), p.energy, p.branch)]
             for p in points]
    marker_csv = _csv_text(mheader, mrows)

    if args.output in (None, "-"):
        _write_text(None, main_csv + "\n" + marker_csv)
    else:
        _write_text(args.output, main_csv)
        target = Path(args.output)
        _write_text(target.with_name(target.stem + "_markers"
                                     + target.suffix), marker_csv)
    return 0


def cmd_bethe(args) -> int:
    spec = _MODEL_SPEC + (
        ("n", None, int),
        ("branch", None, str),
        ("point_index", 0, int),
    )
    opts = _resolve(args, _load_config(args.config), spec)
    if opts["n"] is None or opts["branch"] is None:
        raise _UsageError("--n and --branch are required")
    if opts["n"] < 1:
        raise _UsageError("--n must be at least 1")
    branch = Branch.parse(opts["branch"])
    params = _model_params(opts)
    points, degenerate = _collect_points(params, opts["n"], (branch,))
    points = [p for p in points if p.n == opts["n"]]
    if degenerate:
        print("notice: delta = 0, degenerate atomic limit", file=sys.stderr)
    idx = opts["point_index"]
    if not 0 <= idx < len(points):
        raise _UsageError(
            f"no exceptional point with index {idx}: n={opts['n']} "
            f"branch={branch} has {len(points)} point(s)")
    point = points[idx]
    p = params.replace(g=point.g)
    br = solve_bethe(p, point.n, branch)
    gp = to_gaudin(br)
    res = bethe_residuals(br.roots, p, point.n, branch)
    target = -(p.delta ** 2 + 2.0 * point.n * p.g ** 2) / p.omega ** 2
    payload = {
        "params": {"delta": _jnum(p.delta), "epsilon": _jnum(p.epsilon),
                   "omega": _jnum(p.omega)},
        "n": point.n,
        "branch": str(branch),
        "point_index": idx,
        "g": _jnum(point.g),
        "energy": _jnum(point.energy),
        "calE": _jnum(full_energy(p, point.energy, branch)),
        "roots": [_jcomplex(z) for z in br.roots],
        "gaudin": {
            "A": _jnum(gp.A), "B": _jnum(gp.B), "C": _jnum(gp.C),
            "gamma": _jnum(gp.gamma), "M": gp.M,
            "v": [_jcomplex(v) for v in gp.v],
            "calE": _jnum(gp.calE),
        },
        "residuals": {
            "bethe_max": _jnum(np.max(np.abs(res))),
            "constraint": _jnum(constraint_residual(br)),
            "gaudin_energy": _jnum(abs(gp.A * np.sum(gp.v) - target)),
        },
    }
    _write_text(args.output,
                json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return 0


def cmd_potential(args) -> int:
    spec = _MODEL_SPEC + (
        ("kind", "qes", str),
        ("branch", "plus", str),
        ("n", 1, int),
        ("point_index", 0, int),
        ("g", None, float),
        ("energy", None, float),
        ("x_min", 0.3, float),
        ("x_max", 6.0, float),
        ("samples", 201, int),
        ("form", "partial-fraction", str),
        ("wavefunction", False, _cast_bool),
        ("gaudin_a", None, float),
        ("gaudin_b", None, float),
        ("gaudin_c", None, float),
        ("gaudin_gamma", None, float),
        ("gaudin_v", None, str),
    )
    opts = _resolve(args, _load_config(args.config), spec)
    if opts["samples"] < 1:
        raise _UsageError("--samples must be at least 1")
    if opts["x_min"] <= 0.0 or opts["x_max"] < opts["x_min"]:
        raise _UsageError("need 0 < --x-min <= --x-max")
    if opts["samples"] > 1 and opts["x_max"] == opts["x_min"]:
        raise _UsageError("--samples > 1 needs --x-min < --x-max")
    if opts["kind"] not in ("qes", "full", "gaudin"):
        raise _UsageError("--kind must be qes, full or gaudin")
    try:
        form = PotentialForm.parse(opts["form"])
    except ValueError:
        raise _UsageError(f"unknown --form {opts['form']!r}")
    x = np.linspace(opts["x_min"], opts["x_max"], opts["samples"])
    psi = None

    if opts["kind"] == "gaudin":
        needed = ("gaudin_a", "gaudin_b", "gaudin_c", "gaudin_gamma",
                  "gaudin_v")
        if any(opts[k] is None for k in needed):
            raise _UsageError("kind=gaudin requires --gaudin-a, --gaudin-b, "
                              "--gaudin-c, --gaudin-gamma and --gaudin-v")
        if form is not PotentialForm.PARTIAL_FRACTION:
            raise _UsageError("kind=gaudin has a single printed form")
        try:
            v = [complex(tok) for tok in opts["gaudin_v"].split(",") if tok]
        except ValueError:
            raise _UsageError("--gaudin-v must be a comma-separated list "
                              "of (complex) numbers")
        gp = GaudinParams(A=opts["gaudin_a"], B=opts["gaudin_b"],
                          C=opts["gaudin_c"], gamma=opts["gaudin_gamma"],
                          M=len(v), v=np.array(v, dtype=complex))
        values = gaudin_potential(gp, x)
        if opts["wavefunction"]:
            psi = gaudin_wavefunction(gp, x)
    else:
        branch = Branch.parse(opts["branch"])
        if opts["kind"] == "full":
            if opts["energy"] is None or opts["g"] is None:
                raise _UsageError("kind=full requires --energy and --g")
            params = _model_params(opts, g=opts["g"])
            energy = opts["energy"]
            if opts["wavefunction"]:
                raise _UsageError("closed-form wavefunctions exist only for "
                                  "kind=qes/gaudin")
        else:
            if opts["n"] < 1:
                raise _UsageError("--n must be at least 1")
            if opts["g"] is not None:
                params = _model_params(opts, g=opts["g"])
            else:
                pts = qes_points(_model_params(opts), opts["n"], branch)
                idx = opts["point_index"]
                if not 0 <= idx < len(pts):
                    raise _UsageError(
                        f"no exceptional point with index {idx}: "
                        f"n={opts['n']} branch={branch} has {len(pts)} "
                        "point(s); pass --g to override")
                params = _model_params(opts, g=pts[idx].g)
            energy = qes_energy(params, opts["n"], branch)
            if opts["wavefunction"]:
                br_roots = solve_bethe(params, opts["n"], branch)
                psi = qes_wavefunction(params, opts["n"], branch,
                                       -br_roots.roots, x)
        # single evaluation path for both kinds: the qes table is the full
        # table at the branch energy, so equal inputs give equal bytes
        values = full_potential(params, energy, branch, x, form)

    if psi is None:
        _write_text(args.output,
                    _csv_text(["x", "V"], [[f, v] for f, v in
                                           zip(x, values)]))
    else:
        _write_text(args.output,
                    _csv_text(["x", "V", "psi"],
                              [[f, v, p] for f, v, p in zip(x, values, psi)]))
    return 0


def cmd_verify(args) -> int:
    spec = _MODEL_SPEC + (
        ("n_max", 3, int),
        ("seed", 1234, int),
        ("tolerance_scale", 1.0, float),
        ("checks", None, str),
        ("report", None, str),
    )
    opts = _resolve(args, _load_config(args.config), spec)
    if opts["n_max"] < 1:
        raise _UsageError("--n-max must be at least 1")
    if opts["tolerance_scale"] < 0.0:
        raise _UsageError("--tolerance-scale must be non-negative")
    names = None
    if opts["checks"]:
        names = tuple(t.strip() for t in opts["checks"].split(",")
                      if t.strip())
    try:
        report = run_checks(params=_model_params(opts),
                            n_max=opts["n_max"], seed=opts["seed"],
                            tolerance_scale=opts["tolerance_scale"],
                            names=names)
    except ValueError as exc:
        raise _UsageError(str(exc))
    for line in summary_lines(report):
        print(line)
    if opts["report"]:
        # round floats for stable formatting; timings stay as measured
        for chk in report["checks"]:
            chk["tolerance"] = _jnum(chk["tolerance"])
            chk["observed"] = _jnum(chk["observed"])
        _write_text(opts["report"],
                    json.dumps(report, sort_keys=True, indent=2) + "\n")
    return 0 if report["all_passed"] else 1


# ---------------------------------------------------------------------------
# parser

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rabipt",
        description="Exceptional spectrum of the asymmetric quantum Rabi "
                    "model and its equivalent hyperbolic potentials")
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("qes-points",
                          help="couplings carrying exceptional levels")
    _add_model_flags(sub)
    sub.add_argument("--n-max", dest="n_max", type=int, default=None)
    sub.add_argument("--branch", choices=["plus", "minus", "both"],
                     default=None)
    sub.add_argument("--format", choices=["csv", "json"], default=None)
    sub.set_defaults(func=cmd_qes_points)

    sub = subs.add_parser("spectrum",
                          help="rescaled levels E + g^2/w over a g range")
    _add_model_flags(sub)
    sub.add_argument("--g-min", dest="g_min", type=float, default=None)
    sub.add_argument("--g-max", dest="g_max", type=float, default=None)
    sub.add_argument("--steps", type=int, default=None)
    sub.add_argument("--levels", type=int, default=None)
    sub.add_argument("--truncation", type=int, default=None)
    sub.set_defaults(func=cmd_spectrum)

    sub = subs.add_parser("pt-energies",
                          help="transformed-problem energies calE over g, "
                               "plus exceptional markers")
    _add_model_flags(sub)
    sub.add_argument("--g-min", dest="g_min", type=float, default=None)
    sub.add_argument("--g-max", dest="g_max", type=float, default=None)
    sub.add_argument("--steps", type=int, default=None)
    sub.add_argument("--levels", type=int, default=None)
    sub.add_argument("--truncation", type=int, default=None)
    sub.add_argument("--branch", choices=["plus", "minus", "both"],
                     default=None)
    sub.add_argument("--n-max", dest="n_max", type=int, default=None,
                     help="largest level index for the markers")
    sub.set_defaults(func=cmd_pt_energies)

    sub = subs.add_parser("bethe",
                          help="algebraic roots and Gaudin data at an "
                               "exceptional point")
    _add_model_flags(sub)
    sub.add_argument("--n", type=int, default=None)
    sub.add_argument("--branch", choices=["plus", "minus"], default=None)
    sub.add_argument("--point-index", dest="point_index", type=int,
                     default=None)
    sub.set_defaults(func=cmd_bethe)

    sub = subs.add_parser("potential", help="potential (and wavefunction) "
                                            "tables")
    _add_model_flags(sub)
    sub.add_argument("--kind", choices=["qes", "full", "gaudin"],
                     default=None)
    sub.add_argument("--branch", choices=["plus", "minus"], default=None)
    sub.add_argument("--n", type=int, default=None)
    sub.add_argument("--point-index", dest="point_index", type=int,
                     default=None)
    sub.add_argument("--g", type=float, default=None,
                     help="coupling (kind=qes default: resolved from "
                          "--point-index)")
    sub.add_argument("--energy", type=float, default=None)
    sub.add_argument("--x-min", dest="x_min", type=float, default=None)
    sub.add_argument("--x-max", dest="x_max", type=float, default=None)
    sub.add_argument("--samples", type=int, default=None)
    sub.add_argument("--form", choices=["partial-fraction", "hyperbolic"],
                     default=None)
    sub.add_argument("--wavefunction", action="store_const", const=True,
                     default=None, help="add a psi column (kind=qes/gaudin)")
    sub.add_argument("--gaudin-a", dest="gaudin_a", type=float, default=None)
    sub.add_argument("--gaudin-b", dest="gaudin_b", type=float, default=None)
    sub.add_argument("--gaudin-c", dest="gaudin_c", type=float, default=None)
    sub.add_argument("--gaudin-gamma", dest="gaudin_gamma", type=float,
                     default=None)
    sub.add_argument("--gaudin-v", dest="gaudin_v", default=None,
                     help="comma-separated quasimomenta")
    sub.set_defaults(func=cmd_potential)

    sub = subs.add_parser("verify", help="run the verification suites")
    _add_model_flags(sub)
    sub.add_argument("--n-max", dest="n_max", type=int, default=None)
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--tolerance-scale", dest="tolerance_scale", type=float,
                     default=None)
    sub.add_argument("--checks", default=None,
                     help="comma-separated subset of check names")
    sub.add_argument("--report", default=None, metavar="PATH",
                     help="write the JSON report here")
    sub.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RabiPtError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
