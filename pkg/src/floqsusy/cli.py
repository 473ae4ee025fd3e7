"""Command-line front end: ``floqsusy {quasienergy,potential,berry,verify}``.

Exit codes: 0 ok, 1 configuration error (including unstable models),
2 verification failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys

import numpy as np

from . import berry, darboux
from .classical import FrequencyModel, UnstableError, solve_classical
from .config import ConfigError, dump_config, load_config
from .elliptic import ConvergenceError, Lattice, PoleError
from .states import OscillatorStates
from .verify import Grid, NumericalError, propagate, schrodinger_residual, spectroscopy

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_NUMERIC = 0, 1, 2, 3


class VerificationFailure(Exception):
    """Raised after the report is written when a check fails."""


def build_model(mc):
    if mc.kind == "constant":
        return FrequencyModel.constant(mc.omega0, mc.period)
    if mc.kind == "cosine":
        w2, m, T = mc.omega0**2, mc.modulation, mc.period
        return FrequencyModel.user(lambda t: w2 * (1.0 + m * np.cos(2 * math.pi * np.asarray(t) / T)), T)
    lat = Lattice.from_half_periods(mc.half_period_real, mc.half_period_imag)
    return FrequencyModel.elliptic(mc.omega0, lat)


def build_solution(cfg):
    return solve_classical(build_model(cfg.model), tol=cfg.model.tol)


def build_transform(cfg, states):
    tc = cfg.transformation
    if tc.mode == "create":
        return darboux.CreationTransform(states, tc.k)
    if tc.mode == "delete":
        return darboux.DeletionTransform(states, tc.k)
    return None


# records --------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _plain(v):
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def render(records, fmt):
    """CSV (header row, 17 significant digits) or JSON array of the same records."""
    if fmt == "json":
        return json.dumps([{k: _plain(v) for k, v in r.items()} for r in records], indent=1) + "\n"
    keys = list(records[0]) if records else []
    buf = io.StringIO()
    buf.write(",".join(keys) + "\n")
    for r in records:
        buf.write(",".join(_fmt(r.get(k, "")) for k in keys) + "\n")
    return buf.getvalue()


def emit(records, cfg, out=None):
    text = render(records, cfg.output.format)
    if cfg.output.path == "-":
        (out or sys.stdout).write(text)
    else:
        with open(cfg.output.path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# commands ---------------------------------------------------------------------

def cmd_quasienergy(cfg):
    sol = build_solution(cfg)
    T = sol.period
    mod = 2 * math.pi / T
    st = OscillatorStates(sol)
    recs = [{"quantity": "delta", "n": "", "value": sol.delta, "class": sol.delta_class,
             "note": sol.stability.value}]
    system = "original" if cfg.transformation.mode == "none" else "transformed"
    for n in cfg.levels:
        tc = cfg.transformation
        if tc.mode == "delete" and n in (tc.k, tc.k + 1):
            continue
        e = st.quasienergy(n)
        recs.append({"quantity": "E", "n": n, "value": e, "class": e % mod, "note": system})
    tc = cfg.transformation
    if tc.mode == "create":
        e = -(tc.k + 0.5) * sol.delta
        recs.append({"quantity": "E_created", "n": -tc.k - 1, "value": e, "class": e % mod,
                     "note": f"created k={tc.k}"})
    elif tc.mode == "delete":
        for n in (tc.k, tc.k + 1):
            e = st.quasienergy(n)
            recs.append({"quantity": "E_deleted", "n": n, "value": e, "class": e % mod,
                         "note": f"deleted k={tc.k}"})
    return recs


def _potential_fn(which, k, sol, states):
    if which == "V0":
        return states.potential
    if which == "V1":
        if k % 2:
            raise ConfigError("V1 needs an even k")
        return lambda x, t: sol.omega2(t) * np.asarray(x) ** 2 - darboux.potential_created(k // 2, x, t, sol)
    if which == "V2":
        return lambda x, t: sol.omega2(t) * np.asarray(x) ** 2 - darboux.potential_deleted(k, x, t, sol)
    raise ConfigError(f"unknown potential {which!r}")


def cmd_potential(cfg, which=None, times=None, points=401, x_max=None):
    """Grid ``x, V(x, t_i)..., omega(t_i)^2 x^2...``; default times ``0, T/2``."""
    sol = build_solution(cfg)
    st = OscillatorStates(sol)
    if which is None:
        which = {"none": "V0", "create": "V1", "delete": "V2"}[cfg.transformation.mode]
    T = sol.period
    times = [0.0, T / 2] if not times else list(times)
    if x_max is None:
        g = np.max(sol.gamma(np.linspace(0, T, 64, endpoint=False)))
        x_max = 4.0 * math.sqrt(8.0 * g)
    if points < 2 or not x_max > 0:
        raise ConfigError("points must be >= 2 and x_max positive")
    x = np.linspace(-x_max, x_max, points)
    V = _potential_fn(which, cfg.transformation.k, sol, st)
    cols = [(f"{which}(t={_fmt(t)})", V(x, t)) for t in times]
    cols += [(f"harmonic(t={_fmt(t)})", st.potential(x, t)) for t in times]
    return [{"x": xi, **{name: float(c[i]) for name, c in cols}} for i, xi in enumerate(x)]


def cmd_berry(cfg, samples=64):
    """Closed-form and numeric geometric phases; raises after reporting if they disagree."""
    sol = build_solution(cfg)
    st = OscillatorStates(sol)
    b00, b00_alt = berry.beta0(sol, both=True)
    tr = darboux.CreationTransform(st, 2)
    recs = [{"n": "beta0", "original_closed": b00, "original_numeric": b00_alt,
             "transformed_closed": "", "transformed_numeric": "", "max_abs_diff": abs(b00 - b00_alt)}]
    worst = abs(b00 - b00_alt)
    for n in cfg.levels:
        oc = berry.beta_n(n, "original", b00=b00)
        on = berry.berry_numeric(st.state(n), samples=samples).beta
        tcl = berry.beta_n(n, "transformed_k2", b00=b00)
        tn = berry.berry_numeric(tr.closed_form(n), samples=samples, system="transformed_k2").beta
        d = max(abs(oc - on), abs(tcl - tn))
        worst = max(worst, d)
        recs.append({"n": n, "original_closed": oc, "original_numeric": on,
                     "transformed_closed": tcl, "transformed_numeric": tn, "max_abs_diff": d})
    return recs, worst <= cfg.verify.berry_tol, worst


def _probe(sol, grid, lam=3.0):
    """Gaussian of the ground-state width at t=0, displaced to mean occupation ``lam``."""
    s2 = 8.0 * float(sol.gamma(0.0))
    x = grid.x
    return np.exp(-((x - math.sqrt(2 * lam * s2)) ** 2) / (2 * s2)).astype(complex)


def _check(suite, name, value, tol, passed):
    return {"suite": suite, "check": name, "value": float(value), "tol": float(tol), "passed": bool(passed)}


def cmd_verify(cfg, suite="all", inject_fault=False):
    """Run residual, Floquet and spectroscopy oracles; returns (records, all_passed).

    ``inject_fault`` adds 0.01 to every potential handed to the oracles.
    """
    if suite not in ("residuals", "floquet", "spectroscopy", "all"):
        raise ConfigError(f"unknown suite {suite!r}")
    sol = build_solution(cfg)
    st = OscillatorStates(sol)
    tr = build_transform(cfg, st)
    T = sol.period
    gc, vc, tc = cfg.grid, cfg.verify, cfg.transformation
    grid = Grid.default(sol, gc.width, gc.nx, gc.t_steps)
    bump = 0.01 if inject_fault else 0.0
    V0 = (lambda x, t: st.potential(x, t) + bump)
    Vt = None if tr is None else (lambda x, t: tr.V(x, t) + bump)

    cases = []  # (label, state, potential, expected quasienergy)
    for n in cfg.levels:
        if tr is None:
            cases.append((f"psi_{n}", st.state(n), V0))
        elif tc.mode == "create":
            cases.append((f"Lpsi_{n}", tr.state(n), Vt))
        elif n not in (tc.k, tc.k + 1):
            cases.append((f"chi_{n}", tr.state(n), Vt))
    if tc.mode == "create":
        cases.append((f"v_{tc.k}", tr.created_state(), Vt))

    recs = []
    if suite in ("residuals", "all"):
        for label, s, V in cases:
            r = schrodinger_residual(s, V, grid, threshold=vc.residual_tol)
            recs.append(_check("residuals", f"{label} sup", r.sup_residual, vc.residual_tol, r.passed))
            recs.append(_check("residuals", f"{label} richardson_ratio", r.ratio, 16.0, True))
    if suite in ("floquet", "all"):
        x = grid.x
        for label, s, V in cases:
            out = propagate(s(x, 0.0), V, grid, T)
            ov = complex(np.vdot(s(x, 0.0), out) * grid.dx)
            ph = float(np.angle(ov * np.exp(1j * s.quasienergy * T)))
            recs.append(_check("floquet", f"{label} 1-|overlap|", 1 - abs(ov), vc.floquet_tol,
                               1 - abs(ov) < vc.floquet_tol))
            recs.append(_check("floquet", f"{label} phase_error", abs(ph), 1e-4, abs(ph) < 1e-4))
    if suite in ("spectroscopy", "all"):
        sg = Grid.default(sol, gc.width, gc.spectroscopy_nx, gc.spectroscopy_t_steps)
        V = V0 if tr is None else Vt
        sp = spectroscopy(V, _probe(sol, sg), sg, gc.spectroscopy_periods, T)
        for n in cfg.levels:
            lvl = sp.level_at(st.quasienergy(n))
            deleted = tc.mode == "delete" and n in (tc.k, tc.k + 1)
            ok = lvl < vc.floor_db if deleted else lvl >= vc.floor_db
            recs.append(_check("spectroscopy", f"E_{n} {'absent' if deleted else 'present'} dB", lvl,
                               vc.floor_db, ok))
        if tc.mode == "create":
            lvl = sp.level_at(tr.new_level)
            recs.append(_check("spectroscopy", "E_created present dB", lvl, vc.floor_db, lvl >= vc.floor_db))
    return recs, all(r["passed"] for r in recs)


# entry point ------------------------------------------------------------------

def _parser():
    # accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", default=argparse.SUPPRESS, help="INI config file")
    common.add_argument("-s", "--set", action="append", default=argparse.SUPPRESS,
                        metavar="SECTION.KEY=VALUE", help="override a config value (repeatable)")
    common.add_argument("-f", "--format", choices=("csv", "json"), default=argparse.SUPPRESS,
                        help="output format")
    common.add_argument("-o", "--output", default=argparse.SUPPRESS, help="output path ('-' for stdout)")
    p = argparse.ArgumentParser(prog="floqsusy", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="command", required=True)
    add = lambda name, **kw: sub.add_parser(name, parents=[common], **kw)
    add("quasienergy", help="delta, stability and the quasienergy ladder")
    pp = add("potential", help="potential grids for plotting")
    pp.add_argument("--which", choices=("V0", "V1", "V2"))
    pp.add_argument("--times", type=float, nargs="+", help="times (default 0 and T/2)")
    pp.add_argument("--points", type=int, default=401)
    pp.add_argument("--x-max", type=float)
    pb = add("berry", help="geometric phases, closed form and numeric")
    pb.add_argument("--samples", type=int, default=64)
    pv = add("verify", help="numerical oracles")
    pv.add_argument("--suite", choices=("residuals", "floquet", "spectroscopy", "all"), default="all")
    pv.add_argument("--inject-fault", action="store_true", help="perturb every potential by +0.01")
    add("dump-config", help="print the effective configuration")
    return p


def main(argv=None, out=None):
    args = _parser().parse_args(argv)
    err = sys.stderr
    try:
        overrides = list(getattr(args, "set", []))
        if getattr(args, "format", None):
            overrides.append(f"output.format={args.format}")
        if getattr(args, "output", None):
            overrides.append(f"output.path={args.output}")
        cfg = load_config(getattr(args, "config", None), overrides)
        if args.command == "dump-config":
            (out or sys.stdout).write(dump_config(cfg))
            return EXIT_OK
        if args.command == "quasienergy":
            emit(cmd_quasienergy(cfg), cfg, out)
        elif args.command == "potential":
            emit(cmd_potential(cfg, args.which, args.times, args.points, args.x_max), cfg, out)
        elif args.command == "berry":
            recs, ok, worst = cmd_berry(cfg, args.samples)
            emit(recs, cfg, out)
            print(f"max |closed - numeric| = {worst:.3e}", file=err)
            if not ok:
                raise VerificationFailure(f"berry phases disagree by {worst:.3e}")
        elif args.command == "verify":
            recs, ok = cmd_verify(cfg, args.suite, args.inject_fault)
            emit(recs, cfg, out)
            if not ok:
                bad = [r["check"] for r in recs if not r["passed"]]
                raise VerificationFailure("failed: " + "; ".join(bad))
    except ConfigError as exc:
        print(f"config error: {exc}", file=err)
        return EXIT_CONFIG
    except UnstableError as exc:
        print(f"unstable model, quasienergies undefined: {exc}", file=err)
        return EXIT_CONFIG
    except VerificationFailure as exc:
        print(f"verification failure: {exc}", file=err)
        return EXIT_VERIFY
    except (NumericalError, ConvergenceError, PoleError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=err)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"config error: {exc}", file=err)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
