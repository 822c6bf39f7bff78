"""Experiment harness: the 9-way send/receive matrix plus RCS and CRW.

Builds experiment suites (from built-in defaults or a YAML suite file),
runs replicates with per-replicate seeds, and aggregates into the
blocks / inaccuracies / performance summary plus a per-interval
inaccuracy time series for plotting.
"""

from __future__ import annotations

import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import yaml

from .agent import Controller
from .comm import CommConfig
from .engine import SimConfig, performance, run_simulation
from .world import ArenaConfig, ConfigError, Rect

LEVELS = {"low": 0.30, "medium": 0.60, "high": 0.90}

CSV_COLUMNS = ["experiment", "beta_send", "beta_receive", "controller",
               "mean_blocks", "mean_inaccuracies", "performance",
               "replicates", "seed_base"]

DEFAULT_SEED_BASE = 1000
DESK_REPLICATES = 10
PAPER_REPLICATES = 50


def desk_arena():
    """CI-friendly arena: 32x16, nest = left 2 columns, source = right 12."""
    return ArenaConfig(width=32, height=16,
                       nest=Rect(0, 0, 2, 16),
                       source=Rect(20, 0, 32, 16),
                       block_count=75, sense_radius=2)


def paper_arena():
    """Scaled-up arena for the 128-robot / 75-block configuration."""
    return ArenaConfig(width=48, height=24,
                       nest=Rect(0, 0, 2, 24),
                       source=Rect(44, 0, 48, 24),
                       block_count=75, sense_radius=2)


def base_sim_config(paper_scale=False):
    # Desk broadcast radius 6 (vs 2 at paper scale) keeps the random-cell
    # controller's misinformation fan-out visible with only 32 robots.
    arena = paper_arena() if paper_scale else desk_arena()
    return SimConfig(arena=arena,
                     n_robots=128 if paper_scale else 32,
                     controller=Controller.UTILITY,
                     comm=CommConfig(r_k=2.0 if paper_scale else 6.0),
                     rho=0.001, decay_form="rate",
                     ticks=5000, metrics_interval=1000, seed=0)


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    controller: Controller
    beta_send: float
    beta_receive: float
    replicates: int
    base: SimConfig
    seed_base: int

    def sim_config(self, replicate):
        """Config for one replicate: seed = seed_base + replicate index."""
        selection = "random" if self.controller is Controller.RCS else "utility"
        comm = replace(self.base.comm, beta_send=self.beta_send,
                       beta_receive=self.beta_receive, selection=selection)
        return replace(self.base, controller=self.controller, comm=comm,
                       seed=self.seed_base + replicate)


@dataclass
class AggregateResult:
    spec: ExperimentSpec
    runs: list  # RunMetrics per replicate, in replicate order

    @property
    def mean_blocks(self):
        return sum(r.blocks_collected for r in self.runs) / len(self.runs)

    @property
    def mean_inaccuracies(self):
        return sum(r.inaccuracies for r in self.runs) / len(self.runs)

    @property
    def performance(self):
        return performance(self.mean_blocks, self.mean_inaccuracies)

    @property
    def mean_series(self):
        n = min(len(r.inaccuracy_series) for r in self.runs)
        return [sum(r.inaccuracy_series[i] for r in self.runs) / len(self.runs)
                for i in range(n)]


def _level(value):
    """Accept a Low/Medium/High name or a bare probability."""
    if isinstance(value, str):
        try:
            return LEVELS[value.lower()]
        except KeyError:
            raise ConfigError(f"unknown probability level: {value!r}") from None
    v = float(value)
    if not 0.0 <= v <= 1.0:
        raise ConfigError(f"probability {v} outside [0, 1]")
    return v


def default_suite(paper_scale=False, replicates=None, seed_base=DEFAULT_SEED_BASE):
    """Experiments 1-9 (all send/receive level pairs) plus RCS and CRW."""
    base = base_sim_config(paper_scale)
    if replicates is None:
        replicates = PAPER_REPLICATES if paper_scale else DESK_REPLICATES
    names = ["low", "medium", "high"]
    specs = []
    n = 0
    for send in names:
        for receive in names:
            n += 1
            specs.append(ExperimentSpec(name=str(n), controller=Controller.UTILITY,
                                        beta_send=LEVELS[send],
                                        beta_receive=LEVELS[receive],
                                        replicates=replicates, base=base,
                                        seed_base=seed_base))
    specs.append(ExperimentSpec(name="RCS", controller=Controller.RCS,
                                beta_send=LEVELS["high"], beta_receive=LEVELS["high"],
                                replicates=replicates, base=base, seed_base=seed_base))
    specs.append(ExperimentSpec(name="CRW", controller=Controller.CRW,
                                beta_send=0.0, beta_receive=0.0,
                                replicates=replicates, base=base, seed_base=seed_base))
    return specs


def load_suite(path, replicates=None, seed_base=None):
    """Parse a YAML suite file into ExperimentSpecs.

    Schema (all sections optional; omitted values fall back to the desk
    defaults)::

        arena: {width, height, nest: [x0,y0,x1,y1], source: [x0,y0,x1,y1],
                blocks, sense_radius}
        sim: {ticks, metrics_interval, n_robots, rho, decay_form, r_k}
        replicates: 10
        seed_base: 1000
        experiments:
          - {name: "1", controller: utility, beta_send: low, beta_receive: low}

    CLI-supplied ``replicates``/``seed_base`` override the file's values.
    """
    with open(path) as f:
        doc = yaml.safe_load(f) or {}
    base = base_sim_config()
    arena = base.arena
    if "arena" in doc:
        a = doc["arena"]
        arena = ArenaConfig(
            width=a.get("width", arena.width),
            height=a.get("height", arena.height),
            nest=Rect(*a["nest"]) if "nest" in a else arena.nest,
            source=Rect(*a["source"]) if "source" in a else arena.source,
            block_count=a.get("blocks", arena.block_count),
            sense_radius=a.get("sense_radius", arena.sense_radius))
    sim = doc.get("sim", {})
    base = replace(base, arena=arena,
                   n_robots=sim.get("n_robots", base.n_robots),
                   ticks=sim.get("ticks", base.ticks),
                   metrics_interval=sim.get("metrics_interval", base.metrics_interval),
                   rho=sim.get("rho", base.rho),
                   decay_form=sim.get("decay_form", base.decay_form),
                   comm=replace(base.comm, r_k=sim.get("r_k", base.comm.r_k)))
    if replicates is None:
        replicates = doc.get("replicates", DESK_REPLICATES)
    if seed_base is None:
        seed_base = doc.get("seed_base", DEFAULT_SEED_BASE)
    if "experiments" not in doc:
        raise ConfigError(f"suite file {path} has no 'experiments' section")
    specs = []
    for exp in doc["experiments"]:
        controller = Controller(exp.get("controller", "utility"))
        specs.append(ExperimentSpec(name=str(exp["name"]), controller=controller,
                                    beta_send=_level(exp.get("beta_send", 0.0)),
                                    beta_receive=_level(exp.get("beta_receive", 0.0)),
                                    replicates=replicates, base=base,
                                    seed_base=seed_base))
    return specs


def _run_replicate(job):
    idx, rep, cfg = job
    return idx, rep, run_simulation(cfg)


def run_matrix(suite, jobs=1):
    """Run every spec's replicates; one spec's failure doesn't abort others.

    Returns (results, failures): AggregateResults in suite order, and
    (spec, exception) pairs for specs whose configs failed validation.
    Replicates may run in parallel; results are reduced in (spec,
    replicate) order so parallelism never changes the output.
    """
    failures = []
    jobs_list = []
    for idx, spec in enumerate(suite):
        try:
            for rep in range(spec.replicates):
                cfg = spec.sim_config(rep)
                cfg.validate()
                jobs_list.append((idx, rep, cfg))
        except ConfigError as exc:
            failures.append((spec, exc))
            jobs_list = [j for j in jobs_list if j[0] != idx]

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_replicate, jobs_list))
    else:
        outcomes = [_run_replicate(j) for j in jobs_list]
    outcomes.sort(key=lambda t: (t[0], t[1]))

    by_spec = {}
    for idx, rep, metrics in outcomes:
        by_spec.setdefault(idx, []).append(metrics)
    results = [AggregateResult(spec=suite[idx], runs=by_spec[idx])
               for idx in sorted(by_spec)]
    return results, failures


# -- output -----------------------------------------------------------------

def _fmt(value):
    """Full-precision float text; NaN spelled out."""
    if isinstance(value, float):
        return "NaN" if math.isnan(value) else repr(value)
    return str(value)


def _result_row(res):
    return {"experiment": res.spec.name,
            "beta_send": res.spec.beta_send,
            "beta_receive": res.spec.beta_receive,
            "controller": res.spec.controller.value,
            "mean_blocks": res.mean_blocks,
            "mean_inaccuracies": res.mean_inaccuracies,
            "performance": res.performance,
            "replicates": res.spec.replicates,
            "seed_base": res.spec.seed_base}


def results_csv(results):
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for res in results:
        row = _result_row(res)
        buf.write(",".join(_fmt(row[c]) for c in CSV_COLUMNS) + "\n")
    return buf.getvalue()


def series_csv(results):
    """Mean cumulative inaccuracies per metrics interval, per experiment."""
    buf = io.StringIO()
    buf.write("experiment,controller,tick,mean_inaccuracies\n")
    for res in results:
        interval = res.spec.base.metrics_interval
        for i, value in enumerate(res.mean_series):
            buf.write(f"{res.spec.name},{res.spec.controller.value},"
                      f"{(i + 1) * interval},{_fmt(float(value))}\n")
    return buf.getvalue()


def results_json(results):
    rows = []
    for res in results:
        row = _result_row(res)
        if math.isnan(row["performance"]):
            row["performance"] = "NaN"
        row["runs"] = [{"seed": res.spec.seed_base + i,
                        "blocks": r.blocks_collected,
                        "inaccuracies": r.inaccuracies,
                        "inaccuracy_series": r.inaccuracy_series}
                       for i, r in enumerate(res.runs)]
        rows.append(row)
    return json.dumps(rows, indent=2) + "\n"


def results_table(results):
    widths = [10, 9, 12, 10, 12, 17, 11, 10, 9]
    header = ["experiment", "beta_send", "beta_receive", "controller",
              "mean_blocks", "mean_inaccuracies", "performance",
              "replicates", "seed_base"]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    for res in results:
        row = _result_row(res)
        cells = [row["experiment"], f"{row['beta_send']:.2f}",
                 f"{row['beta_receive']:.2f}", row["controller"],
                 f"{row['mean_blocks']:.2f}", f"{row['mean_inaccuracies']:.3f}",
                 "NaN" if math.isnan(row["performance"]) else f"{row['performance']:.4f}",
                 str(row["replicates"]), str(row["seed_base"])]
        lines.append("  ".join(c.ljust(w) for c, w in zip(cells, widths)))
    return "\n".join(lines) + "\n"


def emit_results(results, fmt="csv"):
    if fmt == "csv":
        return results_csv(results)
    if fmt == "json":
        return results_json(results)
    if fmt == "table":
        return results_table(results)
    raise ConfigError(f"unknown output format: {fmt!r}")
