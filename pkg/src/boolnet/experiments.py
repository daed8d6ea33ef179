"""Experiment recipes behind the command-line subcommands.

Every recipe takes an ``ExperimentConfig``, writes its CSV artifacts (and SVG
views derived from them) into ``config.out`` and returns a ``RunRecord``.
CSV contents depend only on the config, never on timing or run order.
"""

import csv
import io
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from boolnet import igt, svg
from boolnet.config import derive_seed
from boolnet.network import StateVector, random_network, run_to_attractor
from boolnet.optimize import anneal, random_walk
from boolnet.training import Evaluator, make_task_set

# tasks appended when an n-sweep asks for more tasks than the config lists
TASK_ROTATION = (("AND", 2), ("OR", 2), ("NAND", 2), ("NOR", 2))


@dataclass
class RunRecord:
    config: object
    artifacts: list = field(default_factory=list)
    svgs: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    traces: list = field(default_factory=list, repr=False)

    def write(self, out):
        doc = {
            "config": self.config.to_text(),
            "artifacts": self.artifacts,
            "svgs": self.svgs,
            "stats": self.stats,
            "timings": self.timings,
        }
        (Path(out) / "run.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


class _Writer:
    def __init__(self, record):
        self.record = record
        self.out = Path(record.config.out)
        self.out.mkdir(parents=True, exist_ok=True)

    def text(self, name, text):
        (self.out / name).write_text(text)
        self.record.artifacts.append(name)

    def table(self, name, header, rows):
        self.text(name, _csv_text(header, [[_fmt(v) for v in r] for r in rows]))

    def svg(self, name, renderer, source, **kw):
        entry = {"svg": name, "renderer": renderer, "csv": source, "options": kw}
        self.record.svgs.append(entry)
        (self.out / name).write_text(render_entry(self.out, entry))


_RENDERERS = {
    "raster": svg.raster_from_csv,
    "trace": svg.trace_from_csv,
    "curves": svg.curves_from_csv,
    "modes": svg.modes_from_csv,
}


def render_entry(out, entry):
    return _RENDERERS[entry["renderer"]](Path(out) / entry["csv"], **entry["options"])


def render_all(out):
    """Regenerate every SVG listed in ``run.json`` from its CSV."""
    doc = json.loads((Path(out) / "run.json").read_text())
    for entry in doc["svgs"]:
        (Path(out) / entry["svg"]).write_text(render_entry(out, entry))
    return [e["svg"] for e in doc["svgs"]]


def _seeds(cfg, run):
    run_seed = cfg.run_seed(run)
    return derive_seed(run_seed, "network"), derive_seed(run_seed, "search")


def padded_mean(arrays):
    """Mean across runs after padding each run with its last value."""
    longest = max(len(a) for a in arrays)
    stacked = np.array([np.concatenate([a, np.full(longest - len(a), a[-1])]) for a in arrays])
    return stacked.mean(axis=0)


def epochs_to_first_zero(trace, max_epochs):
    """Epoch of the first E = 0; ``max_epochs + 1`` when never reached."""
    first = trace.first_zero_epoch
    return first if first is not None else max_epochs + 1


def anneal_runs(cfg, n_neurons, tasks, progress=None):
    ts = make_task_set(tasks, n_neurons)
    ev = Evaluator(ts, cfg.t_max, cfg.init_policy)
    acfg = cfg.annealer_config()
    traces = []
    for run in range(cfg.runs):
        net_seed, search_seed = _seeds(cfg, run)
        net0 = random_network(n_neurons, net_seed)
        traces.append(anneal(net0, ev, acfg, search_seed))
        if progress:
            progress(run)
    return ts, ev, traces


def _write_anneal_set(w, prefix, cfg, traces):
    for run, tr in enumerate(traces):
        w.text(f"{prefix}run_{run:03d}.csv", tr.to_csv())
    mean_e = padded_mean([t.energy for t in traces])
    mean_t = padded_mean([t.temperature for t in traces])
    w.table(f"{prefix}mean_curve.csv", ("epoch", "mean_E", "mean_T"),
            [(k + 1, mean_e[k], mean_t[k]) for k in range(len(mean_e))])
    w.table(f"{prefix}summary.csv",
            ("run", "solved", "first_zero_epoch", "epochs", "final_E", "cooling_steps"),
            [(run, int(t.solved), t.first_zero_epoch, len(t), float(t.energy[-1]),
              int(np.count_nonzero(np.diff(t.temperature) < 0)))
             for run, t in enumerate(traces)])
    w.svg(f"{prefix}mean_curve.svg", "curves", f"{prefix}mean_curve.csv",
          x_col="epoch", y_cols=["mean_E"], title=f"{prefix}mean E over runs")
    return mean_e


def cmd_anneal(cfg):
    record = RunRecord(cfg)
    w = _Writer(record)
    w.text("config.txt", cfg.to_text())
    t0 = time.perf_counter()
    n = cfg.sizes[0]
    _, _, traces = anneal_runs(cfg, n, cfg.tasks)
    record.timings["anneal_s"] = time.perf_counter() - t0
    mean_e = _write_anneal_set(w, "", cfg, traces)
    record.traces = traces
    record.stats.update(
        n_neurons=n,
        reached_zero=sum(t.first_zero_epoch is not None for t in traces),
        solved=sum(t.solved for t in traces),
        final_mean_E=float(mean_e[-1]),
    )
    record.write(cfg.out)
    return record


def cmd_sweep(cfg):
    record = RunRecord(cfg)
    w = _Writer(record)
    w.text("config.txt", cfg.to_text())
    rows, all_traces = [], {}
    for value in cfg.sweep_values:
        if cfg.sweep_axis == "n":
            pool = list(cfg.tasks) + [TASK_ROTATION[k % len(TASK_ROTATION)]
                                      for k in range(max(0, value - len(cfg.tasks)))]
            n, tasks = cfg.sizes[0], tuple(pool[:value])
        else:
            n, tasks = value, cfg.tasks
        t0 = time.perf_counter()
        _, _, traces = anneal_runs(cfg, n, tasks)
        record.timings[f"{cfg.sweep_axis}={value}_s"] = time.perf_counter() - t0
        _write_anneal_set(w, f"{cfg.sweep_axis}{value}_", cfg, traces)
        steps = [epochs_to_first_zero(t, cfg.max_epochs) for t in traces]
        rows.append((value, float(np.median(steps)),
                     sum(t.first_zero_epoch is not None for t in traces) / len(traces)))
        all_traces[value] = traces
    w.table("difficulty.csv", (cfg.sweep_axis, "median_epochs_to_first_zero", "reached_fraction"),
            rows)
    record.traces = all_traces
    record.stats["median_epochs_to_first_zero"] = {str(v): m for v, m, _ in rows}
    record.stats["nondecreasing"] = all(rows[k][1] <= rows[k + 1][1] for k in range(len(rows) - 1))
    record.write(cfg.out)
    return record


def cmd_randomwalk(cfg):
    record = RunRecord(cfg)
    w = _Writer(record)
    w.text("config.txt", cfg.to_text())
    summary, means = [], []
    for n in cfg.sizes:
        ts = make_task_set(cfg.tasks, n)
        ev = Evaluator(ts, cfg.t_max, cfg.init_policy)
        hits = []
        for run in range(cfg.runs):
            net_seed, search_seed = _seeds(cfg, run)
            tr = random_walk(random_network(n, net_seed), ev, cfg.max_epochs, search_seed)
            name = f"N{n}_run_{run:03d}.csv"
            w.text(name, tr.to_csv())
            if run == 0:
                w.svg(f"N{n}_run_000.svg", "trace", name, title=f"random walk N={n}")
            hits.append(tr.zero_hits)
            summary.append((n, run, tr.zero_hits, tr.first_zero_epoch))
        means.append((n, float(np.mean(hits))))
    w.table("summary.csv", ("N", "run", "zero_hits", "first_zero_epoch"), summary)
    w.table("zero_hits.csv", ("N", "mean_zero_hits"), means)
    record.stats["mean_zero_hits"] = {str(n): m for n, m in means}
    record.write(cfg.out)
    return record


def _raster_rows(states):
    return [[i] + [int(v) for v in states[:, i]] for i in range(states.shape[1])]


def cmd_dynamics(cfg):
    """Trajectories of a random network and of its annealed version."""
    record = RunRecord(cfg)
    w = _Writer(record)
    w.text("config.txt", cfg.to_text())
    n = cfg.sizes[0]
    ts = make_task_set(cfg.tasks, n)
    ev = Evaluator(ts, cfg.t_max, cfg.init_policy)
    net_seed, search_seed = _seeds(cfg, 0)
    net0 = random_network(n, net_seed)
    trace = anneal(net0, ev, cfg.annealer_config(), search_seed)
    w.text("anneal_trace.csv", trace.to_csv())
    w.text("network_initial.txt", net0.to_text())
    w.text("network_annealed.txt", trace.final_network.to_text())
    s0 = StateVector(ev.init[0], ts.training_set().clamped)
    for label, net in (("initial", net0), ("annealed", trace.final_network)):
        res = run_to_attractor(net, s0, ev.t_max)
        states = res.trajectory
        w.table(f"raster_{label}.csv", ["neuron"] + [str(t) for t in range(states.shape[0])],
                _raster_rows(states))
        w.svg(f"raster_{label}.svg", "raster", f"raster_{label}.csv", title=label)
        record.stats[label] = {"transient": res.transient, "orbit_len": res.orbit_len,
                               "converged": res.converged, "columns": int(states.shape[0])}
    record.stats["solved"] = trace.solved
    record.traces = [trace]
    record.write(cfg.out)
    return record


def igt_config(cfg):
    acfg = cfg.annealer_config()
    return igt.IgtConfig(trials=cfg.trials, proposals_per_trial=cfg.proposals_per_trial,
                         n_neurons=cfg.sizes[0] if cfg.kind == "igt" else 5,
                         input_mode=cfg.input_mode, wanted_mode=cfg.wanted_mode,
                         t_max=cfg.t_max, annealer=acfg)


def cmd_igt(cfg):
    record = RunRecord(cfg)
    w = _Writer(record)
    w.text("config.txt", cfg.to_text())
    decks = igt.load_decks(None if cfg.decks == "default" else cfg.decks)
    icfg = igt_config(cfg)
    t0 = time.perf_counter()
    records = [igt.run_session(icfg, cfg.run_seed(run), decks) for run in range(cfg.runs)]
    record.timings["sessions_s"] = time.perf_counter() - t0
    for run, r in enumerate(records):
        w.text(f"session_{run:03d}.csv", r.to_csv())
    agg = igt.aggregate(records)
    w.text("aggregate.csv", agg.to_csv())
    w.svg("aggregate_modes.svg", "modes", "aggregate.csv")
    w.svg("aggregate_budget.svg", "curves", "aggregate.csv", x_col="trial",
          y_cols=["mean_budget"], title="mean budget")
    record.traces = records
    record.stats.update(modes="".join({"B'": "B", "D'": "D"}.get(m, "=") for m in agg.mode),
                        transition_trial=agg.transition_trial(),
                        final_mean_budget=float(agg.mean_budget[-1]))
    record.write(cfg.out)
    return record


COMMANDS = {
    "dynamics": cmd_dynamics,
    "randomwalk": cmd_randomwalk,
    "anneal": cmd_anneal,
    "sweep": cmd_sweep,
    "igt": cmd_igt,
}
