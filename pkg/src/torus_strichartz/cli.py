"""Batch driver: one subcommand per verification suite.

Each run writes ``<suite>.csv`` and ``<suite>.json`` into the output
directory and exits 0 exactly when the suite recorded no violations.
Set ``TORUS_STRICHARTZ_WORKERS`` to spread independent tasks over processes;
results are collected in task order, so outputs do not depend on it.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import SUITES, ConfigError, ExperimentConfig, parse_config, stream, stream_seeds
from .counting import OmegaQuery, alternating_signs, omega_count, omega_counts, omega_naive_histogram, pall_csv, pall_sweep
from .cutoff import DEFAULT_CUTOFF
from .lattice_minima import BoxNormParams, minima_csv, successive_minima
from .propagator import (
    bump_data,
    conjecture_bound,
    experiment_csv,
    exponent_fit,
    lp_spacetime_norm,
    refocus_search,
    theorem_bounds,
)
from .quadform import sample_generic
from .weyl_kernel import KernelSample, SweepTable, l4_time_integrals, log_times, sup_over_x, sup_over_x_batch, weyl_rhs

SCHEMA_VERSION = 1
WORKERS_ENV = "TORUS_STRICHARTZ_WORKERS"

DEFAULT_TOL = {
    "dispersive": 10.0,  # sup |K| / min(N^2, 1/t)
    "weyl": 8.0,  # sup |K|^2 / weyl_rhs
    "t_exponent": 0.35,  # fitted growth of sup |K| in t at the largest N
    "davenport": 21.0,  # davenport_ratio / N^0.2
    "divisor": 200.0,  # pair count / ((A'B')^0.1 h)
    "conjecture": 10.0,  # (norm / ||f||_2) / conj_bound / N^0.2
    "refocus_lo": 3.0,
    "refocus_hi": 5.0,
}


@dataclass
class SuiteResult:
    csv: str
    fitted_exponents: dict = field(default_factory=dict)
    max_ratios: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    summary: str = ""


def _workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _pmap(fn, tasks):
    tasks = list(tasks)
    if _workers() == 1 or len(tasks) < 2:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=_workers()) as pool:
        return list(pool.map(fn, tasks))


def _tol(cfg: ExperimentConfig, name: str) -> float:
    return cfg.tolerances.get(name, DEFAULT_TOL[name])


def _join_csv(parts: list[str]) -> str:
    """Concatenate CSV blocks that share a header line."""
    if not parts:
        return ""
    head, *_ = parts[0].split("\n", 1)
    body = [p.split("\n", 1)[1] for p in parts]
    return head + "\n" + "".join(body)


# --- kernel-sweep ---------------------------------------------------------------


def _kernel_task(args):
    seed, N, t_max = args
    form = sample_generic(seed)
    ts = np.unique(np.concatenate([log_times(float(N) ** -3, 1.0 / N, 30), log_times(1.0 / N**2, t_max, 40)]))
    sups, _ = sup_over_x_batch(form, DEFAULT_CUTOFF, N, ts)
    table = SweepTable(form, seed)
    for t, s in zip(ts, sups):
        disp = s / min(N * N, 1.0 / t) if t <= 1.0 / N else float("nan")
        table.append(KernelSample(N, float(t), float(s), 16 * N, 3), weyl_rhs(form, N, float(t)), disp)
    return table


def suite_kernel_sweep(cfg: ExperimentConfig) -> SuiteResult:
    Ns = cfg.N_list or [16, 32, 64]
    seeds = stream_seeds(cfg.seed, "kernel-sweep.forms", cfg.n_seeds or 20)
    t_max = cfg.t_max or 1e3
    tables = _pmap(_kernel_task, [(s, N, t_max) for s in seeds for N in Ns])
    res = SuiteResult(_join_csv([t.to_csv() for t in tables]))
    disp_max = weyl_max = env_max = 0.0
    long_t, long_s = [], []
    for tab in tables:
        for smp, w, d in zip(tab.samples, tab.weyl, tab.disp):
            N, t, s = smp.N, smp.t, smp.sup_abs
            where = {"seed": tab.seed, "N": N, "t": t}
            if not math.isnan(d):
                disp_max = max(disp_max, d)
                if d > _tol(cfg, "dispersive"):
                    res.violations.append({**where, "quantity": "dispersive", "value": d})
            wr = s * s / w
            weyl_max = max(weyl_max, wr)
            if wr > _tol(cfg, "weyl"):
                res.violations.append({**where, "quantity": "weyl", "value": wr})
            env_max = max(env_max, s / (N ** (4 / 3) * (1 + t * t) ** (1 / 12) * N**0.1))
            if N == max(Ns) and t >= 1:
                long_t.append(t)
                long_s.append(s)
    res.max_ratios = {"dispersive": disp_max, "weyl": weyl_max, "envelope": env_max}
    if len(long_t) >= 3:
        slope, r2 = exponent_fit(list(zip(long_t, long_s)))
        res.fitted_exponents = {"sup_vs_t": slope, "sup_vs_t_r2": r2}
        if slope > _tol(cfg, "t_exponent"):
            res.violations.append({"seed": cfg.seed, "N": max(Ns), "quantity": "t_exponent", "value": slope})
    # time-averaged fourth power on a small grid
    form = sample_generic(seeds[0])
    l4 = {}
    for N in [n for n in Ns if n <= 16] or [8]:
        Ts = cfg.T_list or [2.0, 8.0]
        for T, r in zip(sorted(Ts), l4_time_integrals(form, DEFAULT_CUTOFF, N, Ts, 1 / (8 * form.norm * N * N))):
            l4[f"l4_over_N4T_N{N}_T{T:g}"] = r.value / (N**4 * T)
    res.max_ratios.update(l4)
    res.summary = f"{len(tables)} sweeps, {len(res.violations)} violations"
    return res


# --- minima ---------------------------------------------------------------------


def _minima_task(args):
    seed, N, t = args
    form = sample_generic(seed)
    params = BoxNormParams(form, N, t)
    mins = successive_minima(params)
    sup = sup_over_x(form, DEFAULT_CUTOFF, N, t).sup_abs
    return (N, t, mins.m1, mins.m2, sup, sup * sup * mins.m1 * mins.m2 / N**2, seed)


def suite_minima(cfg: ExperimentConfig) -> SuiteResult:
    Ns = cfg.N_list or [8, 16, 32]
    count = cfg.n_seeds or 50
    t_max = cfg.t_max or 100.0
    tasks = []
    for N in Ns:
        rng = stream(cfg.seed, f"minima.N{N}")
        seeds = rng.integers(0, 2**31 - 1, size=count)
        ts = t_max * (1.0 - rng.random(count))  # in (0, t_max]
        tasks += [(int(s), N, float(t)) for s, t in zip(seeds, ts)]
    rows = _pmap(_minima_task, tasks)
    res = SuiteResult(minima_csv(rows))
    per_N = {}
    for N, t, m1, m2, sup, ratio, seed in rows:
        scaled = ratio / N**0.2
        per_N[N] = max(per_N.get(N, 0.0), ratio)
        if scaled > _tol(cfg, "davenport"):
            res.violations.append({"seed": seed, "N": N, "t": t, "quantity": "davenport", "value": scaled})
    res.max_ratios = {"davenport_over_N0.2": max(r / N**0.2 for N, r in per_N.items())}
    if len(per_N) >= 2:
        res.fitted_exponents = {"max_davenport_vs_N": exponent_fit(sorted(per_N.items()))[0]}
    res.summary = f"{len(rows)} instances, {len(res.violations)} violations"
    return res


# --- pall-verify ----------------------------------------------------------------


def suite_pall_verify(cfg: ExperimentConfig) -> SuiteResult:
    M = max(cfg.N_list) if cfg.N_list else 50
    rows: list = []
    sweep = pall_sweep(M, rows=rows)
    res = SuiteResult(pall_csv(rows))
    for A, B, C, got, brute in sweep.mismatches:
        res.violations.append({"Ap": A, "Bp": B, "Cp": C, "quantity": "pall", "value": got, "expected": brute})
    res.max_ratios = {"divisor_constant": sweep.divisor_constant}
    if sweep.divisor_constant > _tol(cfg, "divisor"):
        A, B, C = sweep.divisor_argmax
        res.violations.append({"Ap": A, "Bp": B, "Cp": C, "quantity": "divisor", "value": sweep.divisor_constant})
    res.summary = "matches: all" if not sweep.mismatches else f"mismatches: {len(sweep.mismatches)}"
    return res


# --- omega ----------------------------------------------------------------------


def suite_omega(cfg: ExperimentConfig) -> SuiteResult:
    Ns = cfg.N_list or [2, 3, 4]
    lines = ["q,N,signs,targets,mismatches"]
    res = SuiteResult("")
    checked = 0
    for q in (1, 2, 3):
        for N in Ns:
            for signs in (alternating_signs(q), (1,) * q):
                hist = omega_naive_histogram(q, N, signs)
                keys = np.array(sorted(hist), dtype=np.int64)
                want = np.array([hist[tuple(k)] for k in keys.tolist()])
                # attained targets plus one unattained neighbour each
                shifted = keys + np.array([0, 0, 1, 0, 0])
                want_s = np.array([hist.get(tuple(k), 0) for k in shifted.tolist()])
                got = omega_counts(q, N, signs, np.concatenate([keys, shifted]))
                bad = int(np.count_nonzero(got != np.concatenate([want, want_s])))
                checked += 2 * len(keys)
                sig = "".join("+" if s > 0 else "-" for s in signs)
                lines.append(f"{q},{N},{sig},{2 * len(keys)},{bad}")
                if bad:
                    res.violations.append({"q": q, "N": N, "signs": sig, "quantity": "omega", "value": bad})
    # trend: four signed points, zero targets (the largest count by Cauchy-Schwarz)
    zero = [(N, omega_count_zero(N)) for N in (4, 6, 8)]
    res.fitted_exponents = {"zero_target_q4_vs_N": exponent_fit(zero)[0]}
    res.max_ratios = {f"zero_target_q4_N{N}": float(c) for N, c in zero}
    res.csv = "\n".join(lines) + "\n"
    res.summary = f"{checked} targets, {len(res.violations)} mismatching blocks"
    return res


def omega_count_zero(N: int) -> int:
    return omega_count(OmegaQuery(4, N, alternating_signs(4), 0, 0, 0, 0, 0))


# --- strichartz -----------------------------------------------------------------


def _strichartz_task(args):
    seed, p, N, T, slice_seed = args
    form = sample_generic(seed)
    f = bump_data(N, "indicator-ball")
    rng = np.random.default_rng(slice_seed)
    val = lp_spacetime_norm(form, f, p, T, max_slices=20000, rng=rng).value / f.l2
    conj = conjecture_bound(2, p, N, T)
    weyl, p8 = theorem_bounds(p, N, T) if p > 4 else (None, None)
    return (seed, p, N, T, val, conj, weyl, p8, val / conj)


def suite_strichartz(cfg: ExperimentConfig) -> SuiteResult:
    Ns = cfg.N_list or [8, 16]
    Ts = cfg.T_list or [1.0, 4.0]
    ps = cfg.p_list or [6.0, 8.0, 10.0]
    if cfg.t_max is not None:
        Ts = [T for T in Ts if T <= cfg.t_max] or [min(Ts)]
    seeds = stream_seeds(cfg.seed, "strichartz.forms", cfg.n_seeds or 1)
    slice_seeds = stream_seeds(cfg.seed, "strichartz.slices", len(seeds) * len(ps) * len(Ns) * len(Ts))
    tasks = []
    for s in seeds:
        for p in ps:
            for N in Ns:
                for T in Ts:
                    tasks.append((s, p, N, T, slice_seeds[len(tasks)]))
    rows = _pmap(_strichartz_task, tasks)
    res = SuiteResult(experiment_csv(rows))
    worst = 0.0
    for seed, p, N, T, val, conj, w, p8, ratio in rows:
        scaled = ratio / N**0.2
        worst = max(worst, scaled)
        if scaled > _tol(cfg, "conjecture"):
            res.violations.append({"seed": seed, "N": N, "T": T, "p": p, "quantity": "conjecture", "value": scaled})
    res.max_ratios = {"norm_over_conjecture_N0.2": worst}
    T1 = min(Ts)
    for s in seeds:
        for p in ps:
            pts = [(N, v) for (sd, pp, N, T, v, *_) in rows if sd == s and pp == p and T == T1]
            if len(pts) >= 2:
                res.fitted_exponents[f"seed{s}_p{p:g}_T{T1:g}_vs_N"] = exponent_fit(pts)[0]
    res.summary = f"{len(rows)} norms, {len(res.violations)} violations"
    return res


# --- refocus --------------------------------------------------------------------


def suite_refocus(cfg: ExperimentConfig) -> SuiteResult:
    Ns = cfg.N_list or [4, 6, 8]
    seeds = stream_seeds(cfg.seed, "refocus.forms", cfg.n_seeds or 20)
    q_max = int(cfg.t_max) if cfg.t_max else 10**7
    lines = ["seed,N,q,worst,found"]
    medians = []
    res = SuiteResult("")
    for N in Ns:
        qs = []
        for s in seeds:
            r = refocus_search(sample_generic(s), N, q_max)
            lines.append(f"{s},{N},{r.q},{r.worst!r},{int(r.found)}")
            qs.append(r.q if r.found else q_max + 1)
            if not r.found:
                res.violations.append({"seed": s, "N": N, "quantity": "refocus_not_found", "value": r.worst})
        medians.append((N, float(np.median(qs))))
    res.csv = "\n".join(lines) + "\n"
    res.max_ratios = {f"median_q_N{N}": m for N, m in medians}
    if len(medians) >= 2:
        slope = exponent_fit(medians)[0]
        res.fitted_exponents = {"median_q_vs_N": slope}
        if not _tol(cfg, "refocus_lo") <= slope <= _tol(cfg, "refocus_hi"):
            res.violations.append({"seed": cfg.seed, "N": max(Ns), "quantity": "refocus_exponent", "value": slope})
    res.summary = f"{len(seeds) * len(Ns)} searches, {len(res.violations)} violations"
    return res


SUITE_RUNNERS = {
    "kernel-sweep": suite_kernel_sweep,
    "minima": suite_minima,
    "pall-verify": suite_pall_verify,
    "omega": suite_omega,
    "strichartz": suite_strichartz,
    "refocus": suite_refocus,
}


def emit_report(cfg: ExperimentConfig, result: SuiteResult) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "suite": cfg.suite,
        "seed": cfg.seed,
        "summary": result.summary,
        "fitted_exponents": result.fitted_exponents,
        "max_ratios": result.max_ratios,
        "violations": result.violations,
        "config": cfg.to_dict(),
    }
    return json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def run(cfg: ExperimentConfig) -> tuple[int, dict]:
    """Run a suite, write ``<suite>.csv`` and ``<suite>.json``; exit code and report."""
    cfg.validate()
    result = SUITE_RUNNERS[cfg.suite](cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{cfg.suite}.csv").write_text(result.csv)
    text = emit_report(cfg, result)
    (out / f"{cfg.suite}.json").write_text(text)
    return (0 if not result.violations else 1), json.loads(text)


def _csv_list(kind):
    def parse(text):
        try:
            vals = [kind(s) for s in text.split(",") if s.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad list {text!r}") from None
        if not vals:
            raise argparse.ArgumentTypeError("empty list")
        return vals

    return parse


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="torus-strichartz", description=__doc__.split("\n")[0])
    ap.add_argument("suite", choices=SUITES)
    ap.add_argument("--config", help="flat key = value config file (or a previous JSON report)")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--n", type=_csv_list(int), help="comma separated N values")
    ap.add_argument("--t-max", type=float, help="largest time (q_max for refocus)")
    ap.add_argument("--p", type=_csv_list(float), help="comma separated exponents")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            cfg = parse_config(Path(args.config).read_text())
            if cfg.suite != args.suite:
                raise ConfigError(f"config is for suite {cfg.suite!r}, not {args.suite!r}")
        else:
            cfg = ExperimentConfig(suite=args.suite)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.out is not None:
            cfg.out = args.out
        if args.n is not None:
            cfg.N_list = args.n
        if args.t_max is not None:
            cfg.t_max = args.t_max
        if args.p is not None:
            cfg.p_list = args.p
        code, report = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    print(f"{report['suite']}: {report['summary']} -> exit {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
