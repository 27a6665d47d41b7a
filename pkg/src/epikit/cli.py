"""Command-line entry point: ``epikit <command> [options]``.

Exit status is 0 on success, 1 on usage or input errors and 2 when a
numerical method fails (divergence, stalled fit, extinction, ...).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import analytic, calibrate, data_io, langevin, scenarios, spatial, stability, stochastic
from .errors import (ComplexDrift, DegenerateSpectrum, EmptyFile, EpikitError, Extinction,
                     InfeasibleState, NegativeDensity, NegativePopulation, NonFinite, ParseError,
                     ScenarioError, Stalled, TooShort)
from .models import STATE_NAMES, derived_stats, r_eff_series, rates_along, simulate
from .svg import write_plot

DEFAULT_SEED = 42
SEED_ENV = "EPIKIT_SEED"

NUMERICAL_ERRORS = (NonFinite, NegativePopulation, NegativeDensity, DegenerateSpectrum, Extinction,
                    ComplexDrift, Stalled, FloatingPointError, OverflowError)
INPUT_ERRORS = (ScenarioError, ParseError, EmptyFile, TooShort, InfeasibleState, ValueError,
                FileNotFoundError, IsADirectoryError, PermissionError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _default_seed() -> int:
    env = os.environ.get(SEED_ENV)
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _emit(table: data_io.Table, out: str | None, fmt: str | None) -> None:
    fmt = fmt or ("json" if out and out.endswith(".json") else "csv")
    text = data_io.table_to_json(table) if fmt == "json" else data_io.table_to_csv(table)
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        data_io.write_text(out, text)


def _print_json(obj, path: str | None = None) -> None:
    text = data_io.to_json(obj)
    if path:
        data_io.write_text(path, text)
    else:
        sys.stdout.write(text)


def _load_scenario(args, kinds: tuple[str, ...]) -> dict:
    if getattr(args, "scenario", None) and getattr(args, "preset", None):
        raise UsageError("give either --preset or --scenario, not both")
    if getattr(args, "scenario", None):
        doc = scenarios.load(args.scenario)
    elif getattr(args, "preset", None):
        doc = scenarios.preset(args.preset)
    else:
        raise UsageError("a --preset or --scenario is required")
    if doc["model"] not in kinds:
        raise ScenarioError(f"this command takes a {'/'.join(kinds)} scenario, got {doc['model']!r}")
    if getattr(args, "t_end", None) is not None:
        doc["t_end"] = args.t_end
    if getattr(args, "dt", None) is not None:
        doc["dt"] = args.dt
    return scenarios.validate(doc)


# commands


def cmd_simulate(args) -> None:
    doc = _load_scenario(args, scenarios.COMPARTMENT_MODELS)
    sc = scenarios.build_compartment(doc)
    traj = simulate(sc.model, sc.params, sc.init, sc.t_end, sc.dt, sc.schedule)
    rates = rates_along(sc.model, sc.params, traj, sc.schedule)
    stride = max(1, int(round(args.sample / sc.dt))) if args.sample else 1
    idx = np.arange(0, len(traj.t), stride)
    cols = ["t", *STATE_NAMES, "new_cases", "new_deaths"]
    data = [list(traj.t[idx])] + [list(traj.y[idx, j]) for j in range(6)]
    data += [list(rates[idx, 5]), list(rates[idx, 4])]
    table = data_io.Table(cols, data)
    _emit(table, args.out, args.format)

    stats = derived_stats(sc.seir, sc.schedule).as_dict()
    final = traj.y[-1]
    stats.update({"model": sc.model, "t_end": float(traj.t[-1]),
                  "final_cases": float(final[5]), "final_deaths": float(final[4])})
    if sc.model == "seir":
        stats["r_eff_crossing"] = r_eff_series(traj, sc.seir, sc.schedule).crossing_time
    stats = {k: (None if isinstance(v, float) and math.isinf(v) else v) for k, v in stats.items()}
    if args.stats:
        _print_json(stats, args.stats)
    elif args.out not in (None, "-"):
        _print_json(stats)
    if args.plot:
        write_plot(args.plot, traj.t, {n: traj.y[:, j] for j, n in enumerate(STATE_NAMES)},
                   title=doc.get("name", sc.model), logy=args.logy)


def cmd_linear_seir(args) -> None:
    if args.preset:
        sc = scenarios.build_compartment(scenarios.preset(args.preset))
        p, init = sc.seir, sc.init
        f0, e0, i0 = init.s, init.e, init.i
        c0, r0, d0 = init.c, init.r, init.d
    else:
        if not (args.params and args.init):
            raise UsageError("need --preset or both --params and --init")
        if len(args.params) != 4 or len(args.init) != 3:
            raise UsageError("--params takes beta,sigma,gamma,f and --init takes F0,E0,I0")
        from .models import SeirParams

        p = SeirParams(args.params[0], args.params[1], args.params[2], args.params[3], 1.0)
        f0, e0, i0 = args.init
        c0, r0, d0 = i0, 0.0, 0.0
    lo, hi, step = args.eval_grid
    if not (step > 0 and hi >= lo):
        raise UsageError("--eval-grid needs start,stop,step with step > 0")
    t = lo + step * np.arange(int(math.floor((hi - lo) / step + 1e-9)) + 1)
    sol = analytic.solve_linear_seir(p, e0, i0, f0, c0=c0, r0=r0, d0=d0)
    rows = analytic.full_state(sol, t)
    names = ("F", "E", "I", "R", "D", "C")
    table = data_io.Table(["t", *names], [list(t)] + [list(rows[:, j]) for j in range(6)])
    _emit(table, args.out, args.format)
    if args.plot:
        write_plot(args.plot, t, {n: rows[:, j] for j, n in enumerate(names) if n != "F"},
                   title="linearized SEIR", logy=True)


def cmd_spatial(args) -> None:
    doc = _load_scenario(args, ("spatial_sir",))
    sc = scenarios.build_spatial(doc)
    series = spatial.run_spatial(sc.init, sc.params, sc.grid, sc.t_end, sc.dt, sc.snapshot_every)
    stride = max(1, int(round(args.sample / sc.dt))) if args.sample else 1
    idx = np.arange(0, len(series.t), stride)
    names = ("S", "I", "R", "D", "C")
    cols = [0, 2, 3, 4, 5]
    table = data_io.Table(["t", *names], [list(series.t[idx])] + [list(series.totals[idx, c]) for c in cols])
    _emit(table, args.out, args.format)
    fin = series.final
    if args.snapshot:
        snap = data_io.Table(["x", "phi_s", "phi_i", "phi_r", "phi_d", "phi_c"],
                             [list(sc.grid.x), list(fin.phi_s), list(fin.phi_i), list(fin.phi_r),
                              list(fin.phi_d), list(fin.phi_c)], {"t": fin.t})
        data_io.write_text(args.snapshot, data_io.table_to_csv(snap))
    if args.spacetime:
        cols_x = [f"x={x:.6g}" for x in sc.grid.x]
        mat = data_io.Table(["t", *cols_x], [list(series.snapshot_t)] +
                            [list(series.phi_i[:, j]) for j in range(sc.grid.n_points)])
        data_io.write_text(args.spacetime, data_io.table_to_csv(mat))
    if args.plot:
        write_plot(args.plot, series.t[idx], {n: series.totals[idx, c] for n, c in zip(names, cols)},
                   title=doc.get("name", "spatial SIR"))


def _stability_params(args):
    if args.preset:
        doc = scenarios.preset(args.preset)
        if doc["model"] != "stability":
            raise ScenarioError(f"preset {args.preset!r} is not a stability preset")
    elif args.scenario:
        doc = scenarios.load(args.scenario)
        if doc["model"] != "stability":
            raise ScenarioError("not a stability scenario")
    elif args.params:
        if len(args.params) != 6:
            raise UsageError("--params takes lam,mu,nu,f,d_s,d_i")
        lam, mu, nu, f, d_s, d_i = args.params
        doc = {"model": "stability", "params": {"lam": lam, "mu": mu, "nu": nu, "f": f, "d_s": d_s,
                                                "d_i": d_i}}
    else:
        raise UsageError("need --preset, --scenario or --params")
    return doc


def cmd_stability(args) -> None:
    doc = _stability_params(args)
    p = scenarios.spatial_params(doc["params"])
    if args.turing_sweep:
        pr = doc["params"]
        ratio = doc.get("diffusion_ratio") or pr["d_i"] / pr["d_s"]
        curves = stability.turing_curves(pr["lam"], ratio, args.k_steps or 200)
        table = data_io.Table(["red_nu", "red_mu", "blue_nu", "blue_mu"],
                              [list(curves[k]) for k in ("red_nu", "red_mu", "blue_nu", "blue_mu")],
                              {"lam": pr["lam"], "diffusion_ratio": ratio})
        _emit(table, args.out, args.format)
        if args.plot:
            write_plot(args.plot, curves["red_nu"], {"red": curves["red_mu"]}, xlabel="nu",
                       title="Turing curves")
        return
    red, blue = stability.steady_states(p)
    state = red if (args.branch or doc.get("branch", "red")) == "red" else blue
    if not state.feasible:
        raise InfeasibleState(f"{state.branch} state has phi_i = {state.phi_i:g} < 0")
    k_max = args.k_max or doc.get("k_max", 1.0)
    k_steps = args.k_steps or doc.get("k_steps", 201)
    ks = np.linspace(0.0, k_max, k_steps)
    tab = stability.dispersion_table(p, state, ks)
    cols = ["k", "B_k", "C_k", "re_omega_plus", "im_omega_plus", "re_omega_minus", "im_omega_minus"]
    hopf = stability.hopf_check(p, state)
    meta = {"branch": state.branch, "phi_s": state.phi_s, "phi_i": state.phi_i,
            "hopf_flag": hopf.oscillatory, "b0": hopf.b0, "c0": hopf.c0}
    if p.d_s > 0 and p.d_i > 0:
        tur = stability.turing_analysis(p, state)
        meta.update({"turing_on_line": tur.on_line, "k_c": tur.k_c, "c_at_kc": tur.c_at_kc,
                     "turing_line_residual": tur.line_residual})
    _emit(data_io.Table(cols, [list(tab[:, j]) for j in range(7)], meta), args.out, args.format)
    if args.plot:
        write_plot(args.plot, ks, {"Im w+": tab[:, 4], "Im w-": tab[:, 6], "C_k": tab[:, 2]},
                   xlabel="k", title=f"dispersion ({state.branch})")


def _stochastic_doc(args) -> dict:
    if not (args.preset or args.scenario):
        args.preset = "gillespie"
    return _load_scenario(args, ("sir_stochastic",))


def cmd_gillespie(args) -> None:
    doc = _stochastic_doc(args)
    p = scenarios.spatial_params(doc["params"])
    cells = doc.get("cells", 1)
    system = stochastic.build_sir_reactions(p, cells, doc.get("cell_volume", 1.0),
                                            doc.get("population_scale", 1.0))
    init = stochastic.OccupancyState.uniform(cells, doc["init"]["s"], doc["init"]["i"])
    init.c_total = doc["init"]["i"] * cells
    seed = args.seed if args.seed is not None else doc.get("seed", _default_seed())
    if args.seed is None and SEED_ENV in os.environ:
        seed = _default_seed()
    runs = args.runs or doc.get("runs", 1)
    grid = np.array(scenarios.sample_grid(doc["t_end"], doc.get("sample_dt", 1.0)))
    if args.events:
        res = stochastic.gillespie_run(system, init, doc["t_end"], rng=stochastic.replicate_rng(seed, 0))
        labels = ["initial" if j < 0 else system.reactions[j].label for j in res.reaction]
        cell = [-1 if j < 0 else system.reactions[j].cell for j in res.reaction]
        ev = data_io.Table(["t", "reaction_label", "cell", "S_total", "I_total", "R_total", "D_total"],
                           [list(res.t), labels, cell] + [[int(v) for v in res.totals[:, c]] for c in range(4)])
        data_io.write_text(args.events, data_io.table_to_csv(ev))
    samples = stochastic.run_ensemble(system, init, doc["t_end"], runs, seed, grid, args.workers)
    cols, data = ["t"], [list(grid)]
    if runs >= 2:
        st = stochastic.ensemble_stats(samples, grid)
        for j, n in enumerate(stochastic.TOTAL_NAMES):
            cols += [f"mean_{n}", f"se_{n}"]
            data += [list(st.mean[:, j]), list(st.se[:, j])]
        mean = st.mean
    else:
        mean = samples[0]
        for j, n in enumerate(stochastic.TOTAL_NAMES):
            cols += [f"mean_{n}", f"se_{n}"]
            data += [list(mean[:, j]), [math.nan] * len(grid)]
    _emit(data_io.Table(cols, data, {"runs": runs, "seed": seed}), args.out, args.format)
    if args.plot:
        write_plot(args.plot, grid, {f"mean {n}": mean[:, j] for j, n in enumerate(stochastic.TOTAL_NAMES)},
                   title=f"Gillespie ensemble ({runs} runs)")


def cmd_langevin(args) -> None:
    if not (args.preset or args.scenario):
        args.preset = "langevin"
    doc = _load_scenario(args, ("spatial_sir",))
    sc = scenarios.build_spatial(doc)
    seed = args.seed if args.seed is not None else _default_seed()
    init = langevin.LangevinFields.from_density(sc.init)
    res = langevin.run_langevin(init, sc.params, sc.grid, sc.t_end, sc.dt, seed,
                                noise=not args.no_noise, real_noise=args.real_noise)
    stride = max(1, int(round(args.sample / sc.dt))) if args.sample else 1
    idx = np.arange(0, len(res.t), stride)
    table = data_io.Table(["t", "S", "I"], [list(res.t[idx]), list(res.totals[idx, 0]), list(res.totals[idx, 1])],
                          {"seed": seed})
    _emit(table, args.out, args.format)
    if args.plot:
        write_plot(args.plot, res.t[idx], {"S": res.totals[idx, 0], "I": res.totals[idx, 1]}, title="Langevin")


def cmd_fit(args) -> None:
    series = data_io.read_case_csv(args.data)
    t = series.days()
    log_space = args.fit_space == "log"
    n = args.population
    if args.model == "sir":
        model = calibrate.sir_fit_model(n, args.i0, with_cases=True)
        observed = (2,)
        data = series.cases.astype(float)[:, None]
    else:
        model = calibrate.seir_fit_model(n, args.i0, t0=args.t0)
        observed = (5, 4)
        data = np.column_stack([series.cases, series.deaths]).astype(float)
    if len(args.p0) != model.n_param:
        raise UsageError(f"--p0 needs {model.n_param} values for {', '.join(model.param_names)}")
    keep = t > 0
    problem = calibrate.FitProblem(model, t[keep], data[keep], observed, log_space, args.dt)
    p0 = np.array(args.p0)
    g0 = calibrate.gradient(problem, p0)
    g_fd = calibrate.central_difference_gradient(lambda q: calibrate.loss(problem, q), p0)
    grad_check = float(np.max(np.abs(g0 - g_fd)) / max(np.max(np.abs(g_fd)), 1e-300))
    if args.method == "gd":
        res = calibrate.fit_gradient_descent(problem, p0, args.h_step, args.max_iters, args.tol)
    else:
        res = calibrate.fit_gauss_newton(problem, p0, args.max_iters, args.tol)
    out = {"model": args.model, "param_names": list(model.param_names), "p": res.p.tolist(),
           "loss": res.loss, "iters": res.iterations, "converged": res.converged,
           "grad_check": grad_check, "fit_space": args.fit_space, "method": args.method,
           "warnings": res.warnings + series.warnings}
    _print_json(out, args.out)
    if args.plot:
        fit = calibrate.solve(model, res.p, t[keep], args.dt)[:, list(observed)]
        curves = {"data cases": data[keep, 0], "model cases": fit[:, 0]}
        write_plot(args.plot, t[keep], curves, title="fit", logy=log_space)


def cmd_fit_curve(args) -> None:
    series = data_io.read_case_csv(args.data)
    t = series.days()
    est, res = calibrate.fit_fermi_dirac(t, series.cases, fit_log=args.fit_space == "log",
                                         max_iters=args.max_iters)
    out = {"ansatz": args.ansatz, "a": est.a, "t0": est.t0, "gamma": est.gamma_fd,
           "asymptote": est.asymptote, "loss": res.loss, "iters": res.iterations,
           "converged": res.converged, "fit_space": args.fit_space,
           "warnings": res.warnings + series.warnings}
    _print_json(out, args.out)
    if args.plot:
        write_plot(args.plot, t, {"cases": series.cases, "fit": calibrate.fermi_dirac_eval(est, t)},
                   title="Fermi-Dirac fit", logy=True)


def cmd_data(args) -> None:
    series = data_io.read_case_csv(args.file)
    for w in series.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if args.action == "ingest":
        table = data_io.as_table(series)
    elif args.action == "diff":
        dc = data_io.daily_new(series.cases, series.dates)
        dd = data_io.daily_new(series.deaths, series.dates)
        table = data_io.Table(["date", "new_cases", "new_deaths", "correction"],
                              [[d.isoformat() for d in dc.dates], dc.values.tolist(), dd.values.tolist(),
                               [bool(a or b) for a, b in zip(dc.negative, dd.negative)]])
    else:
        if args.daily:
            dates = series.dates[1:]
            cases = data_io.daily_new(series.cases).values
            deaths = data_io.daily_new(series.deaths).values
        else:
            dates, cases, deaths = series.dates, series.cases, series.deaths
        table = data_io.Table(["date", "cases_ma", "deaths_ma"],
                              [[d.isoformat() for d in dates],
                               data_io.moving_average(cases, args.window).tolist(),
                               data_io.moving_average(deaths, args.window).tolist()],
                              {"window": args.window, "daily": bool(args.daily)})
    _emit(table, args.out, args.format)
    if args.plot:
        x = np.arange(table.n_rows)
        write_plot(args.plot, x, {c: [float(v) for v in col] for c, col in zip(table.columns[1:3], table.data[1:3])},
                   xlabel="day", title=f"data {args.action}")


# parser


def _common_out(sp) -> None:
    sp.add_argument("--out", help="output path (default stdout); .json selects JSON")
    sp.add_argument("--format", choices=("csv", "json"))
    sp.add_argument("--plot", metavar="SVG", help="write a line plot of the primary columns")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="epikit", description="Epidemic models: compartment ODEs, spatial SIR, "
                 "stability analysis, stochastic simulation and calibration.")
    sub = ap.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    sp = sub.add_parser("simulate", help="SEIR/SIR/linearized/quarantine trajectories")
    sp.add_argument("--preset", choices=scenarios.COMPARTMENT_PRESETS)
    sp.add_argument("--scenario", help="scenario JSON file")
    sp.add_argument("--t-end", type=float)
    sp.add_argument("--dt", type=float)
    sp.add_argument("--sample", type=float, help="output cadence in days (default every step)")
    sp.add_argument("--stats", help="write the derived-statistics block to this JSON file")
    sp.add_argument("--logy", action="store_true", help="log scale for --plot")
    _common_out(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("linear-seir", help="closed-form linearized SEIR solution")
    sp.add_argument("--preset", choices=("fig3",))
    sp.add_argument("--params", type=_floats, help="beta,sigma,gamma,f")
    sp.add_argument("--init", type=_floats, help="F0,E0,I0")
    sp.add_argument("--eval-grid", type=_floats, default=[0.0, 100.0, 1.0], help="start,stop,step")
    _common_out(sp)
    sp.set_defaults(func=cmd_linear_seir)

    sp = sub.add_parser("spatial", help="1-D reaction-diffusion SIR (ETDRK4)")
    sp.add_argument("--preset", choices=scenarios.SPATIAL_PRESETS)
    sp.add_argument("--scenario")
    sp.add_argument("--t-end", type=float)
    sp.add_argument("--dt", type=float)
    sp.add_argument("--sample", type=float, help="output cadence in days (default every step)")
    sp.add_argument("--snapshot", help="CSV of the final fields")
    sp.add_argument("--spacetime", help="CSV matrix of phi_I snapshots")
    _common_out(sp)
    sp.set_defaults(func=cmd_spatial)

    sp = sub.add_parser("stability", help="dispersion relation, Hopf and Turing checks")
    sp.add_argument("--preset", choices=("fig10b",))
    sp.add_argument("--scenario")
    sp.add_argument("--params", type=_floats, help="lam,mu,nu,f,d_s,d_i")
    sp.add_argument("--branch", choices=("red", "blue"))
    sp.add_argument("--k-max", type=float)
    sp.add_argument("--k-steps", type=int)
    sp.add_argument("--turing-sweep", action="store_true", help="emit the red and blue Turing curves")
    _common_out(sp)
    sp.set_defaults(func=cmd_stability)

    sp = sub.add_parser("gillespie", help="exact stochastic SIR ensemble")
    sp.add_argument("--preset", choices=("gillespie",))
    sp.add_argument("--scenario")
    sp.add_argument("--t-end", type=float)
    sp.add_argument("--runs", type=int)
    sp.add_argument("--seed", type=int, help=f"master seed (default ${SEED_ENV} or {DEFAULT_SEED})")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--events", help="CSV of every event of replicate 0")
    _common_out(sp)
    sp.set_defaults(func=cmd_gillespie)

    sp = sub.add_parser("langevin", help="Euler-Maruyama Langevin SIR on a spatial scenario")
    sp.add_argument("--preset", choices=scenarios.SPATIAL_PRESETS)
    sp.add_argument("--scenario")
    sp.add_argument("--t-end", type=float)
    sp.add_argument("--dt", type=float)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--sample", type=float)
    sp.add_argument("--no-noise", action="store_true")
    sp.add_argument("--real-noise", action="store_true", help="use |sigma| for a real-valued SDE")
    _common_out(sp)
    sp.set_defaults(func=cmd_langevin)

    sp = sub.add_parser("fit", help="least-squares fit of a compartment model to case data")
    sp.add_argument("--model", choices=("sir", "seir"), required=True)
    sp.add_argument("--data", required=True)
    sp.add_argument("--p0", type=_floats, required=True)
    sp.add_argument("--fit-space", choices=("linear", "log"), default="linear")
    sp.add_argument("--method", choices=("gd", "gauss-newton"), default="gd")
    sp.add_argument("--population", type=float, required=True)
    sp.add_argument("--i0", type=float, default=5.0)
    sp.add_argument("--t0", type=float, default=0.0, help="control onset for seir")
    sp.add_argument("--dt", type=float, default=calibrate.FIT_DT)
    sp.add_argument("--h-step", type=float, default=1e-3)
    sp.add_argument("--max-iters", type=int, default=500)
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.add_argument("--out")
    sp.add_argument("--plot", metavar="SVG")
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("fit-curve", help="Fermi-Dirac growth-curve fit")
    sp.add_argument("--ansatz", choices=("fermi-dirac",), default="fermi-dirac")
    sp.add_argument("--data", required=True)
    sp.add_argument("--fit-space", choices=("linear", "log"), default="linear")
    sp.add_argument("--max-iters", type=int, default=5000)
    sp.add_argument("--out")
    sp.add_argument("--plot", metavar="SVG")
    sp.set_defaults(func=cmd_fit_curve)

    sp = sub.add_parser("data", help="case-file ingest, daily differences, moving averages")
    sp.add_argument("action", choices=("ingest", "diff", "ma"))
    sp.add_argument("file")
    sp.add_argument("--window", type=int, default=7)
    sp.add_argument("--daily", action="store_true", help="average daily new values instead of totals")
    _common_out(sp)
    sp.set_defaults(func=cmd_data)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except ScenarioError as exc:
        print(f"error: scenario invalid: {exc}", file=sys.stderr)
        print(f"scenario schema: {Path(__file__).parent / 'schemas' / 'scenario.schema.json'}",
              file=sys.stderr)
        return 1
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except INPUT_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except EpikitError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
