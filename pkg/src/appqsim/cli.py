"""Command-line harness: ``appqsim <benchmark> <generate|simulate|score|report|oracle>``.

Every subcommand writes one canonical JSON document (sorted keys, two-space
indent, no timestamps) so that identical configuration and master seed give
byte-identical output.  ``report`` writes a text summary or plot-ready CSV.
With ``--out DIR`` the result goes to ``DIR/<kind>.json`` (``circuits``,
``series``, ``oracle``, ``report``) or ``DIR/report.txt`` / ``DIR/curve.csv``;
otherwise it is printed.

Seed fan-out: the master ``--seed`` is used directly as the trajectory
master of ``simulate`` (streams ``(seed, trajectory, k)``).  Derived seeds
``SeedSequence(seed, spawn_key=(k,))`` feed auxiliary randomness: ``k = 0``
the Max-Cut graph, ``k = 1`` the Max-Cut typicality statistics, ``k = 2``
the Max-Cut protocol shots.  NMR databases are the spawned children of the
master seed.  Hardware users therefore pass the same ``--seed`` to ``score``
to obtain the same databases and statistics.

Errors exit with status 2 and print ``{"error": code, "details": [...]}``
to stderr.  ``APPQSIM_THREADS`` caps BLAS/OpenMP threads when set before
numpy is loaded.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import re
import sys
from pathlib import Path
from typing import Any, Sequence


def _cap_threads() -> None:
    n = os.environ.get("APPQSIM_THREADS")
    if n:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, n)


_cap_threads()

import numpy as np  # noqa: E402

from . import __version__  # noqa: E402
from .simcore import Circuit, MeasurementSeries, NoiseModel, SchemaError, SeriesPoint  # noqa: E402

BENCHMARKS = ("ff_dynamic", "ff_continuous", "kagome", "nmr", "chem", "maxcut")
COMMANDS = ("generate", "simulate", "score", "report", "oracle")

# name -> (type, default); ``None`` defaults are resolved per benchmark
PARAMS: dict[str, dict[str, tuple[type, Any]]] = {
    "ff_dynamic": {
        "lx": (int, 4), "ly": (int, 4), "dt": (float, 0.2), "p": (float, 0.0), "shots": (int, 1000),
        "trajectories": (int, 20), "steps": (int, None), "mc_samples": (int, 10_000),
    },
    "ff_continuous": {
        "lx": (int, 4), "ly": (int, 4), "dt": (float, 0.1), "p": (float, 0.0), "shots": (int, 1000),
        "trajectories": (int, 20), "steps": (int, None), "mc_samples": (int, 10_000),
    },
    "kagome": {
        "lx": (int, 2), "ly": (int, 2), "p": (float, 0.0), "shots": (int, 1000), "trajectories": (int, 20),
        "ms": (str, "0,1,2,4,8,16"), "sign": (int, 1),
    },
    "nmr": {"dt": (float, 0.05), "p": (float, 0.0), "trajectories": (int, 20), "databases": (int, 3), "part": (str, "real")},
    "chem": {
        "n": (int, 4), "T": (float, 4.0), "tau": (float, None), "circuits": (int, 100), "shots": (int, 100),
        "p": (float, 0.0), "hamiltonian": (str, None), "electrons": (int, None), "theta": (float, 0.15),
    },
    "maxcut": {
        "n": (int, 12), "T": (float, 3.0), "shots": (int, 200), "groups": (int, 10), "p": (float, 0.0),
        "trajectories": (int, 20), "stats_samples": (int, 200), "graph": (str, None), "connectivity": (str, "all"),
    },
}  # fmt: skip


# ---------------------------------------------------------------------------
# JSON helpers


def _plain(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def emit_json(obj: Any) -> str:
    """Canonical serialization used for every output document."""
    return json.dumps(_plain(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def config_hash(benchmark: str, params: dict[str, Any], seed: int) -> str:
    blob = json.dumps(_plain({"benchmark": benchmark, "parameters": params, "seed": seed}), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def provenance(benchmark: str, params: dict[str, Any], seed: int) -> dict[str, Any]:
    return {
        "config_hash": config_hash(benchmark, params, seed),
        "seed": seed,
        "appqsim": __version__,
        "numpy": np.__version__,
    }


def derived_seed(seed: int, k: int) -> int:
    return int(np.random.SeedSequence(int(seed), spawn_key=(k,)).generate_state(1)[0])


def _read_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise SchemaError("file_not_found", [str(path)]) from None
    except json.JSONDecodeError as exc:
        raise SchemaError("invalid_json", [f"{path}: {exc}"]) from None


def ingest_series(path: str | Path, benchmark: str | None = None) -> tuple[MeasurementSeries, int]:
    """Validated series and the number of zero-filled points.

    NMR series are indexed by step ``n`` (or time ``t = n dt``) and
    missing points are filled with ``FID = 0``; other benchmarks are
    returned as parsed.
    """
    series = MeasurementSeries.from_json(_read_json(path))
    if benchmark is not None and series.benchmark != benchmark:
        raise SchemaError("benchmark_mismatch", [f"series is for {series.benchmark!r}, expected {benchmark!r}"])
    if series.benchmark != "nmr":
        return series, 0
    from . import nmr

    dt = series.parameters.get("dt")
    if not isinstance(dt, (int, float)) or dt <= 0:
        raise SchemaError("invalid_series", ["nmr series needs a positive parameters.dt"])
    n_steps = nmr.step_count(float(dt))
    by_n: dict[int, SeriesPoint] = {}
    for p in series.points:
        n = p.n if p.n is not None else round(p.t / dt)
        if p.n is None and abs(p.t / dt - n) > 1e-6:
            raise SchemaError("invalid_series", [f"t={p.t} is not a multiple of dt"])
        if not 0 <= n <= n_steps:
            raise SchemaError("invalid_series", [f"step {n} outside 0..{n_steps}"])
        by_n[n] = SeriesPoint(p.mean, p.stderr, p.shots, n=n)
    gaps = n_steps + 1 - len(by_n)
    points = [by_n.get(n, SeriesPoint(0.0, 0.0, 0, n=n)) for n in range(n_steps + 1)]
    return MeasurementSeries(series.benchmark, points, series.parameters, series.exact), gaps


# ---------------------------------------------------------------------------
# parameters


def resolve_params(benchmark: str, args: argparse.Namespace) -> dict[str, Any]:
    """Defaults, then ``--config`` JSON, then explicit flags; validated before any compute."""
    spec = PARAMS[benchmark]
    params = {k: d for k, (_, d) in spec.items()}
    problems: list[str] = []
    if args.config:
        cfg = _read_json(args.config)
        if not isinstance(cfg, dict):
            raise SchemaError("invalid_config", ["config must be a JSON object"])
        for k, v in cfg.items():
            if k not in spec:
                problems.append(f"unknown parameter {k!r}")
                continue
            typ = spec[k][0]
            try:
                params[k] = None if v is None else typ(v)
            except (TypeError, ValueError):
                problems.append(f"{k}: expected {typ.__name__}")
    for k in spec:
        v = getattr(args, k, None)
        if v is not None:
            params[k] = v
    for k in ("p",):
        if k in params and not 0.0 <= params[k] <= 1.0:
            problems.append("p must lie in [0, 1]")
    for k in ("shots", "trajectories", "circuits", "groups", "mc_samples", "databases", "stats_samples"):
        if params.get(k) is not None and params[k] < 1:
            problems.append(f"{k} must be positive")
    if problems:
        raise SchemaError("invalid_config", problems)
    if benchmark == "nmr":
        from . import nmr

        nmr.step_count(params["dt"])
        if params["part"] not in ("real", "abs"):
            raise SchemaError("invalid_config", ["part must be 'real' or 'abs'"])
    elif benchmark == "maxcut":
        from . import maxcut

        maxcut.step_count(params["T"])
        if params["connectivity"] not in ("all", "linear"):
            raise SchemaError("invalid_config", ["connectivity must be 'all' or 'linear'"])
    elif benchmark == "ff_continuous":
        _ratio(params["dt"])
    elif benchmark == "kagome":
        params["ms"] = ",".join(str(m) for m in _ms(params["ms"]))
    return params


def _ratio(dt: float) -> int:
    ratio = 0.2 / dt
    r = int(round(ratio))
    if r < 1 or abs(ratio - r) > 1e-9:
        raise ValueError("step_count_not_integer")
    return r


def _ms(text: str) -> list[int]:
    try:
        ms = sorted({int(x) for x in str(text).split(",") if x.strip()})
    except ValueError:
        raise SchemaError("invalid_config", ["ms must be a comma-separated list of integers"]) from None
    if not ms or ms[0] < 0:
        raise SchemaError("invalid_config", ["ms must be nonempty and nonnegative"])
    return ms


# ---------------------------------------------------------------------------
# free fermions


def _ff_setup(benchmark: str, params: dict[str, Any]):
    from . import ffbench, fforacle

    r = _ratio(params["dt"]) if benchmark == "ff_continuous" else 1
    T = params["steps"] if params["steps"] is not None else 2 * params["lx"]
    cfg = ffbench.FFBenchConfig(
        params["lx"], params["ly"], dt=params["dt"], max_steps=T * r, p=params["p"],
        shots=params["shots"], trajectories=params["trajectories"],
    )  # fmt: skip
    ocfg = fforacle.OracleConfig(params["lx"], params["ly"], dt=0.2 if r > 1 else params["dt"])
    return cfg, ocfg, r, T


def ff_generate(benchmark: str, params: dict[str, Any], seed: int) -> dict[str, Any]:
    from . import ffbench

    cfg, _, r, T = _ff_setup(benchmark, params)
    lat = cfg.lattice
    return {
        "circuits": {
            "prep": ffbench.build_initial_state_circuit(lat, cfg.occupation).to_json(),
            "trotter_step": ffbench.build_trotter_step(lat, cfg.dt).to_json(),
        },
        "schedule": {"readout_after_steps": [k * r for k in range(T + 1)], "measure": "Z", "sites": list(range(lat.n_sites))},
        "observable_weights": cfg.weights,
        "two_qubit_gates_per_step": ffbench.build_trotter_step(lat, cfg.dt).two_qubit_cost(),
    }


def ff_simulate(benchmark: str, params: dict[str, Any], seed: int) -> MeasurementSeries:
    from .ffbench import FFSimulator

    cfg, _, r, T = _ff_setup(benchmark, params)
    res = FFSimulator(cfg).run(seed)
    pts = [SeriesPoint(float(res.mean[k * r]), float(res.stderr[k * r]), res.shots, n=k) for k in range(T + 1)]
    meta = {k: params[k] for k in ("lx", "ly", "dt", "p", "shots", "trajectories")}
    meta["continuous"] = benchmark == "ff_continuous"
    meta["form"] = "sum_j f_j <n_j>"
    return MeasurementSeries(benchmark, pts, meta)


def ff_oracle(benchmark: str, params: dict[str, Any], seed: int) -> dict[str, Any]:
    from . import dcscore, fforacle

    _, ocfg, _, T = _ff_setup(benchmark, params)
    t_exact, t_site = dcscore.oracle_references(ocfg, T, continuous=benchmark == "ff_continuous")
    fermionic = [fforacle.exact_O(n, ocfg) if benchmark == "ff_dynamic" else None for n in range(T + 1)]
    return {"steps": list(range(1, T + 1)), "t_exact": t_exact, "t_site": t_site, "exact_fermionic": fermionic}


def _ff_inputs(benchmark: str, series: MeasurementSeries, params: dict[str, Any], oracle: dict | None):
    from . import dcscore, fforacle

    sp = series.parameters
    lx, ly = int(sp.get("lx", params["lx"])), int(sp.get("ly", params["ly"]))
    continuous = benchmark == "ff_continuous"
    if bool(sp.get("continuous", False)) != continuous:
        raise SchemaError("invalid_series", ["'continuous' flag does not match the benchmark"])
    dt = float(sp.get("dt", params["dt"]))
    ocfg = fforacle.OracleConfig(lx, ly, dt=0.2 if continuous else dt)
    pts = [p for p in series.points if p.n is not None and p.n >= 1]
    T = len(pts)
    inputs = dcscore.inputs_from_series(MeasurementSeries(benchmark, pts, {**sp, "dt": dt}), ocfg, T=T)
    if oracle is not None:
        t_exact = np.asarray(oracle["t_exact"], dtype=float)
        t_site = np.asarray(oracle["t_site"], dtype=float)
        if t_exact.shape != (T,) or t_site.shape != inputs.t_site.shape:
            raise SchemaError("oracle_mismatch", ["oracle table does not match the series length or lattice"])
        inputs = dcscore.DCInputs(inputs.m, inputs.tau, t_exact, t_site, inputs.weights, r=inputs.r)
    return inputs


def ff_score(benchmark: str, series_list: list[MeasurementSeries], params: dict[str, Any], seed: int, oracle: dict | None) -> dict[str, Any]:
    from . import dcscore

    series = _single(series_list)
    inputs = _ff_inputs(benchmark, series, params, oracle)
    sc = dcscore.score_distribution(inputs, params["mc_samples"], seed)
    return {
        "score": {
            "x": sc.x, "delta_x": sc.delta_x, "n_star": sc.n_star, "shots_required": sc.shots_required,
            "capped_fraction": sc.capped_fraction,
        },
        "diagnostics": {"mean_score": sc.mean_score, "point_score": sc.point_score, "mc_samples": sc.mc_samples, "r": inputs.r},
        "curve": {"n": inputs.steps, "measured": inputs.m, "stderr": inputs.tau, "exact": inputs.t_exact},
    }  # fmt: skip


# ---------------------------------------------------------------------------
# kagome


def kagome_generate(params: dict[str, Any], seed: int) -> dict[str, Any]:
    from . import kagome

    lat = kagome.build_kagome(params["lx"], params["ly"])
    return {
        "lattice": {"bonds": lat.bonds, "matching": lat.matching, "sites": lat.n_sites},
        "circuits": {str(M): kagome.build_adiabatic_circuit(lat, M, params["sign"]).to_json() for M in _ms(params["ms"])},
        "measure": ["X", "Y", "Z"],
    }


def kagome_simulate(params: dict[str, Any], seed: int) -> MeasurementSeries:
    from . import kagome

    lat = kagome.build_kagome(params["lx"], params["ly"])
    sweep = kagome.energy_sweep(lat, _ms(params["ms"]), NoiseModel(params["p"]), params["shots"], seed, params["trajectories"], params["sign"])
    pts = [SeriesPoint(e.energy, e.stderr, params["shots"], n=e.M) for e in sweep]
    meta = {k: params[k] for k in ("lx", "ly", "p", "shots", "trajectories", "sign")}
    return MeasurementSeries("kagome", pts, meta)


def kagome_oracle(params: dict[str, Any], seed: int) -> dict[str, Any]:
    from . import kagome

    lat = kagome.build_kagome(params["lx"], params["ly"])
    if lat.n_sites > 24:
        raise SchemaError("too_large", ["exact references need at most 24 sites"])
    ms = _ms(params["ms"])
    return {
        "ground_energy": kagome.ground_energy(lat, params["sign"]),
        "noiseless_energy": {str(M): kagome.exact_energy(lat, M, params["sign"]) for M in ms},
    }


def kagome_score(series_list: list[MeasurementSeries], params: dict[str, Any], seed: int, oracle: dict | None) -> dict[str, Any]:
    from . import kagome

    series = _single(series_list)
    entries = [(p.n, p.mean, p.stderr) for p in series.points]
    s_kh, m_star = kagome.score_skh(entries)
    diag: dict[str, Any] = {}
    if oracle is not None and "ground_energy" in oracle:
        diag["ratio_to_ground"] = s_kh / float(oracle["ground_energy"])
    return {
        "score": {"S_KH": s_kh, "M_star": m_star},
        "diagnostics": diag,
        "curve": {"M": [e[0] for e in entries], "E": [e[1] for e in entries], "dE": [e[2] for e in entries]},
    }


# ---------------------------------------------------------------------------
# nmr


def nmr_generate(params: dict[str, Any], seed: int) -> dict[str, Any]:
    from . import nmr

    system = nmr.SpinSystem()
    return {
        "circuits": {
            "pulse": Circuit(system.n, nmr.pulse_gates(system)).to_json(),
            "trotter_step": nmr.build_nmr_trotter_step(system, params["dt"]).to_json(),
        },
        "steps": nmr.step_count(params["dt"]),
        "observable": "FID(n dt) = tr[Pi^dag S_z(n dt) Pi S_z(0)]",
    }


def nmr_simulate(params: dict[str, Any], seed: int) -> MeasurementSeries:
    from . import nmr

    fid, err = nmr.simulate_fid(params["dt"], NoiseModel(params["p"]), seed, params["trajectories"])
    shots = params["trajectories"] if params["p"] > 0 else 0
    pts = [SeriesPoint(float(m), float(s), shots, n=n) for n, (m, s) in enumerate(zip(fid, err))]
    return MeasurementSeries("nmr", pts, {k: params[k] for k in ("dt", "p", "trajectories")}, exact=params["p"] == 0)


def nmr_oracle(params: dict[str, Any], seed: int) -> dict[str, Any]:
    from . import nmr

    n = nmr.step_count(params["dt"])
    times = np.arange(n + 1) * params["dt"]
    return {
        "dt": params["dt"],
        "fid_exact": nmr.exact_fid(nmr.SpinSystem(), times),
        "database_seeds": nmr.database_seeds(seed, params["databases"]),
    }


def nmr_score(series_list: list[MeasurementSeries], params: dict[str, Any], seed: int, oracle: dict | None, gaps: int) -> dict[str, Any]:
    from . import nmr

    series = _single(series_list)
    dt = float(series.parameters["dt"])
    fid = np.array(series.means)
    sc = nmr.score_nmr(fid, dt, params["databases"], seed, params["part"])
    ids = [
        {"database_seed": i.database_seed, "index": i.index, "delta_j": i.delta_j, "compatibility": i.match.value,
         "rate": i.match.rate, "shift": i.match.shift}
        for i in sc.identifications
    ]  # fmt: skip
    return {
        "score": {"S_NMR": sc.score, "stderr": sc.stderr},
        "diagnostics": {"identifications": ids, "zero_filled": gaps, "dt": dt},
        "curve": {"omega": nmr.omega_grid(), "spectrum": nmr.spectrum_from_series(fid, dt, part=params["part"])},
    }


# ---------------------------------------------------------------------------
# chemistry


def _chem_ham(params: dict[str, Any], n: int | None = None):
    from . import chem

    if params["hamiltonian"]:
        return chem.load_hamiltonian(params["hamiltonian"], params["electrons"])
    return chem.load_hamiltonian(int(n if n is not None else params["n"]), params["electrons"])


def _chem_tau(ham, params: dict[str, Any]) -> float:
    from . import chem

    return params["tau"] if params["tau"] is not None else chem.optimal_tau(ham, params["T"])


def chem_generate(params: dict[str, Any], seed: int) -> dict[str, Any]:
    from . import chem
    from .simcore import trajectory_rng

    ham = _chem_ham(params)
    tau = _chem_tau(ham, params)
    p1 = chem.sample_event_schedule(ham, params["T"], tau, trajectory_rng(seed, 0, 0))
    p2 = chem.sample_event_schedule(ham, params["T"], tau, trajectory_rng(seed, 0, 1))
    return {
        "circuits": {"0": chem.build_return_circuit(ham, tau, p1, p2).to_json()},
        "measure": {"qubit": ham.n_qubits, "basis": "X"},
        "lambda": chem.lambda_factor(ham, params["T"], tau),
        "tau": tau,
    }


def chem_simulate(params: dict[str, Any], seed: int) -> MeasurementSeries:
    from . import chem

    ham = _chem_ham(params)
    tau = _chem_tau(ham, params)
    run = chem.run_return_amplitude(ham, chem.RandomizedRunConfig(params["T"], tau, params["circuits"], params["shots"], params["p"], seed))
    lam2 = run.lam**2
    pt = SeriesPoint(run.E * lam2, run.dE * lam2, params["circuits"] * params["shots"], t=params["T"])
    meta = {"n_qubits": ham.n_qubits, "T": params["T"], "tau": tau, "circuits": params["circuits"], "shots": params["shots"], "p": params["p"]}
    meta["electrons"] = ham.electrons
    return MeasurementSeries("chem", [pt], meta)


def chem_oracle(params: dict[str, Any], seed: int) -> dict[str, Any]:
    from . import chem

    ham = _chem_ham(params)
    tau = _chem_tau(ham, params)
    return {
        "n_qubits": ham.n_qubits,
        "integrated_weight": chem.integrated_weight(ham, params["T"]),
        "optimal_tau": chem.optimal_tau(ham, params["T"]),
        "tau": tau,
        "lambda": chem.lambda_factor(ham, params["T"], tau),
        "expected_events_per_pass": float(chem.expected_events(ham, params["T"], tau).sum()),
    }


def chem_score(series_list: list[MeasurementSeries], params: dict[str, Any], seed: int, oracle: dict | None) -> dict[str, Any]:
    from . import chem

    runs = []
    for s in series_list:
        sp = s.parameters
        ham = _chem_ham(params, sp.get("n_qubits"))
        if len(s.points) != 1:
            raise SchemaError("invalid_series", ["chem series holds exactly one point (ancilla <X>)"])
        lam = chem.lambda_factor(ham, float(sp["T"]), float(sp["tau"]))
        E, dE = s.points[0].mean / lam**2, s.points[0].stderr / lam**2
        runs.append({"N": ham.n_qubits, "T": sp["T"], "tau": sp["tau"], "E": E, "dE": dE, "lambda": lam,
                     "passes": chem.pass_test(E, dE, params["theta"])})  # fmt: skip
    by_n: dict[int, list[bool]] = {}
    for r in runs:
        by_n.setdefault(r["N"], []).append(r["passes"])
    return {"score": {"S_QC": chem.score_qc(by_n)}, "diagnostics": {"runs": runs, "theta": params["theta"]}}


# ---------------------------------------------------------------------------
# max-cut


def _maxcut_graph(params: dict[str, Any], seed: int):
    from . import maxcut

    if params["graph"]:
        return maxcut.CutGraph.load(params["graph"])
    return maxcut.generate_graph(params["n"], derived_seed(seed, 0))


def maxcut_generate(params: dict[str, Any], seed: int) -> dict[str, Any]:
    from . import maxcut

    g = _maxcut_graph(params, seed)
    return {"graph": g.to_json(), "circuits": {"0": maxcut.build_annealing_circuit(g, params["T"]).to_json()}}


def maxcut_simulate(params: dict[str, Any], seed: int) -> MeasurementSeries:
    from . import maxcut

    g = _maxcut_graph(params, seed)
    mult = maxcut.linear_routing_multiplier(g) if params["connectivity"] == "linear" else 1.0
    noise = NoiseModel(params["p"], multiplier=mult)
    res = maxcut.solve_protocol(g, params["T"], params["shots"], params["groups"], noise, derived_seed(seed, 2), params["trajectories"])
    pts = [SeriesPoint(float(v), 0.0, params["shots"], n=i) for i, v in enumerate(res.groups)]
    meta = {"graph": g.to_json(), "T": params["T"], "shots": params["shots"], "p": params["p"], "groups": params["groups"]}
    meta.update(connectivity=params["connectivity"], routing_multiplier=mult)
    return MeasurementSeries("maxcut", pts, meta)


def maxcut_oracle(params: dict[str, Any], seed: int) -> dict[str, Any]:
    from . import maxcut

    g = _maxcut_graph(params, seed)
    stats = maxcut.build_stats(g.n, params["stats_samples"], derived_seed(seed, 1))
    return {
        "graph": g.to_json(),
        "optimum": maxcut.exact_maxcut(g),
        "typicality": {"means": stats.means, "vbar": stats.vbar, "samples": stats.samples, "v": maxcut.graph_variance(g, stats.means)},
        "typical": maxcut.typicality(g, stats),
        "routing_multiplier_line": maxcut.linear_routing_multiplier(g),
    }


def maxcut_score(series_list: list[MeasurementSeries], params: dict[str, Any], seed: int, oracle: dict | None) -> dict[str, Any]:
    from . import maxcut

    attempts: dict[int, list[dict]] = {}
    stats_cache: dict[int, Any] = {}
    rows = []
    for s in series_list:
        sp = s.parameters
        g = maxcut.CutGraph.from_json(sp["graph"])
        if g.n not in stats_cache:
            stats_cache[g.n] = maxcut.build_stats(g.n, params["stats_samples"], derived_seed(seed, 1))
        outcomes = np.array(s.means)
        if len(outcomes) < 10 or not np.all((outcomes == 0) | (outcomes == 1)):
            raise SchemaError("invalid_series", ["maxcut series needs >= 10 group outcomes in {0, 1}"])
        mean = float(outcomes.mean())
        se = math.sqrt(mean * (1 - mean) / outcomes.size)
        row = {
            "N": g.n, "T": sp.get("T"), "shots": int(sp["shots"]), "mean": mean, "stderr": se,
            "solved": mean - 2 * se > 0.5, "typical": maxcut.typicality(g, stats_cache[g.n]),
            "connected": g.is_connected(), "shot_runtime": sp.get("shot_runtime"),
        }  # fmt: skip
        rows.append(row)
        attempts.setdefault(g.n, []).append(row)
    sc = maxcut.score_maxcut(attempts)
    return {"score": {"score_MaxCut": sc.score, "time_to_solution": sc.time_to_solution}, "diagnostics": {"attempts": rows, **sc.diagnostics}}


# ---------------------------------------------------------------------------
# dispatch


def _single(series_list: list[MeasurementSeries]) -> MeasurementSeries:
    if len(series_list) != 1:
        raise SchemaError("invalid_input", ["exactly one --series file expected"])
    return series_list[0]


def _generate(b: str, params, seed):
    if b.startswith("ff_"):
        return ff_generate(b, params, seed)
    return {"kagome": kagome_generate, "nmr": nmr_generate, "chem": chem_generate, "maxcut": maxcut_generate}[b](params, seed)


def _simulate(b: str, params, seed) -> MeasurementSeries:
    if b.startswith("ff_"):
        return ff_simulate(b, params, seed)
    return {"kagome": kagome_simulate, "nmr": nmr_simulate, "chem": chem_simulate, "maxcut": maxcut_simulate}[b](params, seed)


def _oracle(b: str, params, seed):
    if b.startswith("ff_"):
        return ff_oracle(b, params, seed)
    return {"kagome": kagome_oracle, "nmr": nmr_oracle, "chem": chem_oracle, "maxcut": maxcut_oracle}[b](params, seed)


def _score(b: str, args, params, seed) -> dict[str, Any]:
    if not args.series:
        raise SchemaError("invalid_input", ["--series is required"])
    ingested = [ingest_series(p, b) for p in args.series]
    series_list = [s for s, _ in ingested]
    oracle = _read_json(args.oracle) if args.oracle else None
    if b.startswith("ff_"):
        return ff_score(b, series_list, params, seed, oracle)
    if b == "nmr":
        return nmr_score(series_list, params, seed, oracle, sum(g for _, g in ingested))
    return {"kagome": kagome_score, "chem": chem_score, "maxcut": maxcut_score}[b](series_list, params, seed, oracle)


def _summary(benchmark: str, report: dict[str, Any]) -> str:
    lines = [f"benchmark: {benchmark}", f"config_hash: {report['provenance']['config_hash']}", f"seed: {report['provenance']['seed']}"]
    for k, v in sorted(report["score"].items()):
        lines.append(f"{k}: {v:.6g}" if isinstance(v, float) else f"{k}: {v}")
    for k, v in sorted(report.get("diagnostics", {}).items()):
        if isinstance(v, (int, float, str)) or v is None:
            lines.append(f"  {k}: {v:.6g}" if isinstance(v, float) else f"  {k}: {v}")
    return "\n".join(lines) + "\n"


def _curve_csv(report: dict[str, Any]) -> str:
    curve = report.get("curve")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if curve:
        cols = list(curve)
        w.writerow(cols)
        for row in zip(*(_plain(curve[c]) for c in cols)):
            w.writerow(["" if v is None else repr(float(v)) if isinstance(v, float) else v for v in row])
    else:
        rows = _plain(report.get("diagnostics", {}).get("runs") or report.get("diagnostics", {}).get("attempts") or [])
        if rows:
            cols = sorted(rows[0])
            w.writerow(cols)
            for r in rows:
                w.writerow([r.get(c) for c in cols])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="appqsim", description="Application-oriented quantum simulation benchmarks.")
    sub = parser.add_subparsers(dest="benchmark", required=True)
    for b in BENCHMARKS:
        p = sub.add_parser(b, help=f"{b} benchmark")
        p.add_argument("command", choices=COMMANDS)
        p.add_argument("--seed", type=int, default=0, help="master seed")
        p.add_argument("--out", default=None, help="output directory (default: print)")
        p.add_argument("--format", choices=("json", "text", "csv"), default=None)
        p.add_argument("--config", default=None, help="JSON file of benchmark parameters")
        p.add_argument("--series", nargs="+", default=None, help="MeasurementSeries JSON file(s) to score")
        p.add_argument("--oracle", default=None, help="oracle table JSON (optional for score)")
        for name, (typ, default) in PARAMS[b].items():
            flag = "--" + name.replace("_", "-")
            p.add_argument(flag, dest=name, type=typ, default=None, help=f"default: {default}")
    return parser


def _error(code: str, details: Sequence[str]) -> int:
    sys.stderr.write(emit_json({"error": code, "details": list(details)}))
    return 2


def run(args: argparse.Namespace) -> tuple[str, str]:
    """Execute a parsed command; returns ``(filename, content)`` of the produced document."""
    b, cmd, seed = args.benchmark, args.command, args.seed
    params = resolve_params(b, args)
    prov = provenance(b, params, seed)
    if cmd == "generate":
        doc = {"benchmark": b, "parameters": params, **_generate(b, params, seed), "provenance": prov}
        return "circuits.json", emit_json(doc)
    if cmd == "simulate":
        series = _simulate(b, params, seed)
        return "series.json", emit_json({**series.to_json(), "provenance": prov})
    if cmd == "oracle":
        return "oracle.json", emit_json({"benchmark": b, "parameters": params, **_oracle(b, params, seed), "provenance": prov})
    report = {"benchmark": b, "parameters": params, **_score(b, args, params, seed), "provenance": prov}
    report = _plain(report)
    fmt = args.format or ("json" if cmd == "score" else "text")
    if fmt == "json":
        return "report.json", emit_json(report)
    if fmt == "csv":
        return "curve.csv", _curve_csv(report)
    return "report.txt", _summary(b, report)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        name, content = run(args)
    except SchemaError as exc:
        return _error(exc.code, exc.details)
    except (ValueError, KeyError, TypeError) as exc:
        msg = str(exc).strip("'\"")
        if re.fullmatch(r"[a-z]+(_[a-z]+)+", msg):
            return _error(msg, [])
        return _error("invalid_input", [f"{type(exc).__name__}: {msg}"])
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(content)
    else:
        sys.stdout.write(content)
    return 0


if __name__ == "__main__":
    sys.exit(main())
