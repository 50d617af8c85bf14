"""
Command-line front end.

    crspectra spectrum --n 3 --gamma 1 --kappa 0,0,0 --jmax 4 --format csv
    crspectra states   --n 3 --kappa 1,0,0 --j 3
    crspectra wavefn   --n 2 --kappa 1,1 --j 4 --l 2
    crspectra scatter  --n 2 --gamma 1 --p 1 --in 0.6,0.8 --out 1,0 --method all
    crspectra verify   {residuals,commutators,orthonormality,oracle,all}

Exit status: 0 success, 1 bad arguments or invalid input, 2 a numerical
check missed its tolerance (or a numerical routine did not converge).

Reports go to stdout, or to the file given by ``-o/--output``.  When a
report file is written, the plot-ready data (``<stem>.dat``) and a figure
(``<stem>.png``) are written next to it.  For every command except
``scatter``, ``--out`` is accepted as a synonym of ``--output``; under
``scatter`` it names the outgoing direction.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import bound, scatter, verify
from .errors import CRError, DomainError, TruncationWarning
from .qnum import BoundLabels, ModelParams, enumerate_states

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
VERIFY_SUITES = ("residuals", "commutators", "orthonormality", "oracle", "all")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; 2 is reserved for numerics here
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _floats(raw):
    if isinstance(raw, (list, tuple)):
        return [float(v) for v in raw]
    return [float(v) for v in str(raw).split(",") if v.strip()]


def _ints(raw):
    if isinstance(raw, (list, tuple)):
        return [int(v) for v in raw]
    return [int(v) for v in str(raw).split(",") if v.strip()]


def fmt(v):
    """Round-trip text for one value: 17 significant digits for floats."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    if v is None:
        return ""
    if isinstance(v, (list, tuple)):
        return " ".join(fmt(x) for x in v)
    return str(v)


# -- report assembly -----------------------------------------------------------

class Report:
    """Rows (a table), checks, and the echo of the command and parameters."""

    def __init__(self, command, params):
        self.command = command
        self.params = params
        self.rows = []
        self.checks = []
        self.notes = []
        self.plot = None  # (header, columns, figure kwargs)
        self.studies = None

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def as_dict(self, wall_ms):
        out = {"command": self.command, "params": self.params,
               "checks": [c.as_dict() for c in self.checks], "pass": self.passed, "wall_ms": wall_ms}
        if self.rows:
            out["rows"] = self.rows
        if self.notes:
            out["notes"] = self.notes
        return out

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        table = self.rows or [c.as_dict() for c in self.checks]
        if table:
            keys = list(table[0])
            writer.writerow(keys)
            for row in table:
                writer.writerow([fmt(row.get(k)) for k in keys])
        return buf.getvalue()

    def to_json(self, wall_ms):
        return json.dumps(_jsonable(self.as_dict(wall_ms)), indent=2) + "\n"

    def to_human(self):
        lines = [f"crspectra {self.command}"]
        lines += [f"  {k} = {_short(v)}" for k, v in self.params.items()]
        if self.rows:
            keys = list(self.rows[0])
            cells = [[_short(r.get(k)) for k in keys] for r in self.rows]
            widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
            lines.append("")
            lines.append("  ".join(k.rjust(w) for k, w in zip(keys, widths)))
            lines += ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells]
        if self.checks:
            lines.append("")
            for c in self.checks:
                status = "PASS" if c.passed else "FAIL"
                tol = "" if c.tol is None else f" (tol {c.tol:.1e})"
                lines.append(f"  [{status}] {c.name}: {_short(c.measured)}{tol} [{c.method}]"
                             + (f"  {c.detail}" if c.detail else ""))
            lines.append(f"\n  overall: {'PASS' if self.passed else 'FAIL'} "
                         f"({sum(c.passed for c in self.checks)}/{len(self.checks)} checks)")
        lines += [f"  note: {n}" for n in self.notes]
        return "\n".join(lines) + "\n"


def _short(v):
    if isinstance(v, (float, np.floating)):
        return f"{v:.10g}"
    if isinstance(v, (list, tuple)):
        return " ".join(_short(x) for x in v)
    return fmt(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def emit_plot_data(results, path, header=None):
    """
    Write whitespace-separated columns with a ``#`` header line.

    Parameters
    ----------
    results : dict of name -> sequence, or sequence of dict rows
    path : str or Path
    header : list of str, optional
        Column order (defaults to the dict order).

    Raises
    ------
    DomainError
        If there is nothing to write; no file is created in that case.
    """
    if isinstance(results, dict):
        names = list(header or results)
        cols = [list(results[k]) for k in names]
    else:
        rows = list(results)
        names = list(header or (rows[0] if rows else []))
        cols = [[r[k] for r in rows] for k in names]
    if not names or not cols or not cols[0]:
        raise DomainError("no plot data to write")
    if len({len(c) for c in cols}) != 1:
        raise DomainError("plot columns differ in length")
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write("# " + " ".join(n.replace(" ", "_") for n in names) + "\n")
        for row in zip(*cols):
            fh.write(" ".join(fmt(float(v)) for v in row) + "\n")
    return path


def _write_plot(report, data_path):
    from . import plotting

    header, cols, kw = report.plot
    emit_plot_data(dict(zip(header, cols)), data_path, header)
    png = Path(data_path).with_suffix(".png")
    if report.studies:
        plotting.render_convergence(png, report.studies, title=report.command)
    else:
        plotting.render(png, cols, header, title=report.command, **kw)
    return png


# -- commands ------------------------------------------------------------------

def _require(args, *names):
    # checked here rather than by argparse so that a config file can supply them
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = {"dir_in": "--in", "dir_out": "--out"}
        raise UsageError("missing required option(s): " + ", ".join(flags.get(n, "--" + n) for n in missing))


def _model(args, default_n=2, default_kappa=None):
    n = args.n if args.n is not None else default_n
    kappa = _ints(args.kappa) if args.kappa is not None else (default_kappa or [0] * n)
    sigma = _ints(args.sigma) if args.sigma is not None else None
    return ModelParams(n, args.gamma, tuple(kappa), None if sigma is None else tuple(sigma))


def cmd_spectrum(args):
    params = _model(args)
    rep = Report("spectrum", {**params.as_dict(), "jmax": args.jmax})
    if args.jmax < params.kappa_sum:
        raise DomainError(f"jmax = {args.jmax} is below sum(kappa) = {params.kappa_sum}; the spectrum is empty")
    for j in range(params.kappa_sum, args.jmax + 1):
        rep.rows.append({"j": j, "nu": bound.principal(params, j), "energy": bound.energy(params, j),
                         "degeneracy": len(enumerate_states(params, j)), "method": "formula"})
    rep.plot = (["j", "energy"], [[r["j"] for r in rep.rows], [r["energy"] for r in rep.rows]], {"kind": "points"})
    return rep


def cmd_states(args):
    params = _model(args)
    js = [args.j] if args.j is not None else list(range(params.kappa_sum, args.jmax + 1))
    rep = Report("states", {**params.as_dict(), "j": js})
    n = params.n
    for j in js:
        for lab in enumerate_states(params, j):
            st = bound.BoundState(params, lab)
            row = {"j": lab.j, "l": lab.l}
            row.update({f"m{i + 1}": m for i, m in enumerate(lab.m)})
            row["energy"] = st.energy
            if n > 1:
                row.update({f"I{p}": ev for p, ev in enumerate(st.casimir_eigenvalues())})
            row["method"] = "formula"
            rep.rows.append(row)
    return rep


def cmd_wavefn(args):
    _require(args, "j", "l")
    params = _model(args)
    labels = BoundLabels(args.j, args.l, tuple(_ints(args.m)) if args.m else ())
    state = bound.BoundState(params, labels)
    direction = np.array(_floats(args.dir) if args.dir else [1.0] * params.n)
    if direction.shape != (params.n,) or np.any(direction <= 0):
        raise DomainError("--dir needs n strictly positive components")
    direction = direction / np.linalg.norm(direction)
    scale = bound.principal(params, labels.j) / params.gamma
    r_max = args.rmax if args.rmax else 6.0 * scale
    r = np.linspace(r_max / args.num, r_max, args.num)
    rad = bound.radial_R(params, labels.j, labels.l, r)
    values = state(r[:, None] * direction[None, :])
    rep = Report("wavefn", {**params.as_dict(), **labels.as_dict(), "dir": direction.tolist(),
                            "rmax": r_max, "num": args.num})
    rep.rows = [{"r": float(a), "R": float(b), "psi": float(c), "method": "formula"} for a, b, c in zip(r, rad, values)]
    norm = verify.bound_radial_norm(params, labels.j, labels.l)
    rep.checks.append(verify._at_most("radial norm |int R^2 r^(n-1) dr - 1|", abs(norm - 1.0),
                                      args.tol if args.tol is not None else 1e-8, "quadrature"))
    rep.notes.append(f"energy {state.energy:.17g} (formula)")
    rep.plot = (["r", "R", "psi"], [r, rad, values], {})
    return rep


def _threads(args):
    if args.threads:
        return args.threads
    return int(os.environ.get("CRSPECTRA_THREADS", "1") or 1)


def _amp_row(res):
    v = res.value
    return {"method": res.method, "re": v.real, "im": v.imag, "abs": abs(v), "cross_section": abs(v) ** 2,
            "err_estimate": res.err_estimate}


def cmd_scatter(args):
    _require(args, "p", "dir_in", "dir_out")
    params = _model(args)
    config = scatter.ScatterConfig.normalized(params, args.p, _floats(args.dir_in), _floats(args.dir_out))
    if args.method == "all":
        methods = ["partial_wave", "integral"]
        if not any(params.kappa):
            methods.insert(1, "closed_k0")
    else:
        methods = [args.method]
    kw = {"partial_wave": {"l_max": args.lmax}, "integral": {"nodes_per_axis": args.nodes, "threads": _threads(args)}}
    rep = Report("scatter", {**params.as_dict(), "p": args.p, "rho": config.rho, "dir_in": list(config.dir_in),
                             "dir_out": list(config.dir_out), "method": args.method})
    results = {}
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TruncationWarning)
        for m in methods:
            results[m] = scatter.amplitude(config, m, **kw.get(m, {}))
    rep.notes += [str(w.message) for w in caught]
    rep.rows = [_amp_row(r) for r in results.values()]
    tol = args.tol if args.tol is not None else 1e-3
    names = list(results)
    for a in range(len(names)):
        for b in range(a + 1, len(names)):
            fa, fb = results[names[a]].value, results[names[b]].value
            scale = max(abs(fa), abs(fb))
            dev = abs(fa - fb) / scale if scale > 1e-12 else abs(fa - fb)
            rep.checks.append(verify._at_most(f"{names[a]} vs {names[b]}", dev, tol, f"{names[a]} vs {names[b]}"))
    if args.sweep:
        rep.plot = _sweep(config, methods, args.sweep, kw)
    return rep


def _sweep(config, methods, num, kw):
    """Cross-section against the outgoing polar angle (n = 2 only)."""
    if config.params.n != 2:
        raise DomainError("--sweep is available for n = 2 only")
    phi_in = math.atan2(config.dir_in[1], config.dir_in[0])
    phis = (np.arange(num) + 0.5) * (0.5 * math.pi / num)
    phis = phis[np.abs(phis - phi_in) > 1e-3]
    cols = [phis]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        for m in methods:
            vals = []
            for phi in phis:
                c = scatter.ScatterConfig(config.params, config.p, config.dir_in, (math.cos(phi), math.sin(phi)))
                vals.append(abs(scatter.amplitude(c, m, **kw.get(m, {})).value) ** 2)
            cols.append(np.array(vals))
    return (["phi_out"] + [f"dsigma_{m}" for m in methods], cols, {"logy": True})


def cmd_verify(args):
    suite = args.suite
    params = _model(args, default_n=2, default_kappa=[1, 1] if args.n in (None, 2) else None)
    extra = {"suite": suite}
    if suite in ("residuals", "all"):
        extra["jmax"] = args.jmax
    if suite in ("commutators", "all"):
        extra["orders"] = _ints(args.orders)
        extra["variant"] = args.variant
    rep = Report(f"verify {suite}", {**params.as_dict(), **extra})
    tol = args.tol
    if suite in ("oracle", "all"):
        rep.checks += verify.spectrum_checks(tol=tol if tol is not None and suite == "oracle" else 1e-8)
        rep.checks += verify.phase_checks()
        rep.checks += verify.grid_checks()
    if suite in ("orthonormality", "all"):
        rep.checks += verify.orthonormality_checks(params, l_max=args.lmax,
                                                   tol=tol if tol is not None and suite != "all" else 1e-8)
    if suite in ("residuals", "all"):
        if params.n not in (2, 3):
            raise DomainError("residual checks are set up for n = 2 or 3")
        rep.checks += verify.residual_checks(params, j_max=args.jmax,
                                             tol=tol if tol is not None and suite != "all" else 1e-6)
    if suite in ("commutators", "all"):
        orders = tuple(_ints(args.orders))
        if any(o not in (2, 4, 6) for o in orders):
            raise DomainError("--orders takes values from 2, 4, 6")
        studies = verify.commutator_studies(params, orders, fields=verify.FIELDS[: args.fields], variant=args.variant)
        rep.checks += verify.study_checks(studies, tol if tol is not None and suite != "all" else 1e-3)
        first = [st for fi, st, _ in studies if fi == 0]
        rep.studies = first
        rep.plot = _convergence_columns(first)
    return rep


def _convergence_columns(studies):
    # plot data: one row per (study, spacing)
    idx, h, res, order = [], [], [], []
    for k, st in enumerate(studies):
        for hh, rr in zip(st.spacings, st.residuals):
            idx.append(k)
            h.append(hh)
            res.append(rr)
            order.append(st.order)
    return (["study", "h", "residual", "order"], [idx, h, res, order], {})


# -- parser ----------------------------------------------------------------------

def _common(scatter_mode=False):
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("model")
    g.add_argument("--n", type=int, help="dimension n")
    g.add_argument("--gamma", type=float, default=1.0, help="Coulomb strength (default 1)")
    g.add_argument("--kappa", help="barrier integers, comma separated (default all 0)")
    g.add_argument("--sigma", help="magnetic labels, comma separated (default all 0)")
    o = p.add_argument_group("output")
    o.add_argument("--format", choices=("csv", "json", "human"), default="human")
    names = ["-o", "--output"] if scatter_mode else ["-o", "--output", "--out"]
    o.add_argument(*names, dest="output", metavar="PATH", help="write the report here instead of stdout")
    o.add_argument("--plot-data", metavar="PATH", help="write plot-ready columns (and a .png next to them)")
    o.add_argument("--tol", type=float, help="override the tolerance of the main check")
    o.add_argument("--threads", type=int, help="worker threads (default: $CRSPECTRA_THREADS or 1)")
    o.add_argument("--config", metavar="JSON", help="JSON file with option values; explicit flags win")
    o.add_argument("--no-timing", action="store_true", help="report wall_ms as 0 (byte-reproducible JSON)")
    return p


def build_parser():
    parser = _Parser(prog="crspectra", description="Coulomb problem with inverse-square barriers on the positive "
                     "octant: spectra, wavefunctions, scattering amplitudes and numerical certificates.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    common, common_sc = _common(), _common(scatter_mode=True)

    p = sub.add_parser("spectrum", parents=[common], help="energy levels up to jmax")
    p.add_argument("--jmax", type=int, default=4)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("states", parents=[common], help="basis labels and Casimir eigenvalues")
    p.add_argument("--j", type=int)
    p.add_argument("--jmax", type=int, default=4)
    p.set_defaults(func=cmd_states)

    p = sub.add_parser("wavefn", parents=[common], help="wavefunction along a ray from the origin")
    p.add_argument("--j", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--m", help="m_1..m_{n-2}, comma separated")
    p.add_argument("--dir", help="ray direction (default the diagonal)")
    p.add_argument("--rmax", type=float)
    p.add_argument("--num", type=int, default=200)
    p.set_defaults(func=cmd_wavefn)

    p = sub.add_parser("scatter", parents=[common_sc], help="scattering amplitude by one or all methods")
    p.add_argument("--p", type=float, help="momentum magnitude")
    p.add_argument("--in", dest="dir_in", help="incoming direction (normalised for you)")
    p.add_argument("--out", dest="dir_out", help="outgoing direction (normalised for you)")
    p.add_argument("--method", choices=scatter.METHODS + ("all",), default="all")
    p.add_argument("--lmax", type=int, help="partial-wave cutoff")
    p.add_argument("--nodes", type=int, default=64, help="initial quadrature nodes per axis")
    p.add_argument("--sweep", type=int, metavar="N", help="also sweep the outgoing angle (n = 2) over N points")
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("verify", parents=[common], help="numerical certificates")
    p.add_argument("suite", choices=VERIFY_SUITES)
    p.add_argument("--jmax", type=int, default=4)
    p.add_argument("--lmax", type=int, default=6)
    p.add_argument("--orders", default="2,4,6")
    p.add_argument("--fields", type=int, default=3, choices=(1, 2, 3), help="number of test fields")
    p.add_argument("--variant", choices=("corrected", "printed"), default="corrected",
                   help="operator coefficients: corrected (default) or as published")
    p.set_defaults(func=cmd_verify)
    return parser, sub


def _config_defaults(argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    try:
        data = json.loads(Path(known.config).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config {known.config}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    out = {}
    for key, val in data.items():
        key = key.replace("-", "_")
        if key in ("in", "out"):
            key = "dir_" + key
        # lists become the comma form the flags use
        out[key] = ",".join(str(v) for v in val) if isinstance(val, list) else val
    return out


def run(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    start = time.perf_counter()
    try:
        parser, sub = build_parser()
        defaults = _config_defaults(argv)
        if defaults:
            for action in sub.choices.values():
                action.set_defaults(**defaults)
        args = parser.parse_args(argv)
        report = args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (CRError, ValueError) as exc:
        if isinstance(exc, (RuntimeError,)):
            print(f"numerical failure: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RuntimeError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    wall_ms = 0 if args.no_timing else round(1000.0 * (time.perf_counter() - start), 3)
    text = {"csv": report.to_csv, "human": report.to_human}.get(args.format)
    text = text() if text else report.to_json(wall_ms)
    if args.output:
        out = Path(args.output)
        out.write_text(text, encoding="utf-8")
        if report.plot:
            data = out.with_suffix(".dat") if out.suffix != ".dat" else out.with_name(out.stem + ".plot.dat")
            _write_plot(report, data)
        print(f"{report.command}: {'PASS' if report.passed else 'FAIL'} -> {out}")
    else:
        sys.stdout.write(text)
    if args.plot_data and report.plot:
        _write_plot(report, args.plot_data)
    return EXIT_OK if report.passed else EXIT_NUMERIC


def main():
    sys.exit(run())
