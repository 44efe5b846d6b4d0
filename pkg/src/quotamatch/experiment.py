"""Batch experiment pipeline: generate instances over a parameter grid,
solve both optimization problems, run the lottery, and aggregate.

The config file is plain ``key = value`` text; ``#`` starts a comment and
comma-separated values form lists.  Recognized keys::

    scenario     = sg-desk          # label written into every row
    data         = sg               # dataset directory or bundled name
    block_scale  = 0.1              # optional block-size scaling
    models       = dist, ethn       # any of dist ethn proj price chicago
    params       = 1, 5, 10         # sigma2 (or rho for proj) per cell
    n            = 135              # agent counts (list allowed)
    reps         = 30               # instances per cell
    trials       = 20               # lottery permutations per instance
    master_seed  = 7
    solver       = auto             # exact solver for the constrained optimum
    mode         = effective        # quota flavor for the bounds
    out          = results          # output directory

Output: ``results.csv`` (one row per cell) and, unless disabled, one bar
figure per model rendered beside it.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .generators import ModelConfig, generate
from .geodata import GeoDataset, load_geodata, scale_blocks
from .lottery import derive_seed, lottery_monte_carlo
from .model import InputError
from .pod import assemble_report
from .solvers import choose_exact_method, solve, solve_unconstrained

CSV_COLUMNS = [
    "scenario", "model", "param", "n", "m", "rep_count",
    "mean_pod", "se_pod", "mean_bound5", "mean_lottery_ratio", "se_lottery_ratio",
    "se_lottery_ratio_pooled", "mean_lottery_ratio_of_means",
    "mean_opt", "mean_opt_c", "mean_beta",
    "bound4_effective", "lower_bound_only", "errors",
]


@dataclass
class ExperimentConfig:
    scenario: str
    data: str
    models: list[str]
    params: list[float]
    ns: list[int]
    reps: int
    trials: int
    master_seed: int
    solver: str = "auto"
    mode: str = "effective"
    block_scale: Optional[float] = None
    out: str = "results"

    def __post_init__(self) -> None:
        if not self.models or not self.params or not self.ns:
            raise InputError("experiment grid must be nonempty")
        if self.reps < 1:
            raise InputError("reps must be at least 1")
        if self.trials < 1:
            raise InputError("trials must be at least 1")


def parse_config(path: str) -> ExperimentConfig:
    values: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise InputError(f"{path} line {lineno}: expected 'key = value'")
                key, _, value = line.partition("=")
                values[key.strip()] = value.strip()
    except OSError as exc:
        raise InputError(f"cannot read config: {exc}") from exc

    def take(key: str, default=None):
        return values.pop(key, default)

    def as_list(raw: str) -> list[str]:
        return [part.strip() for part in raw.split(",") if part.strip()]

    try:
        scale_raw = take("block_scale")
        cfg = ExperimentConfig(
            scenario=take("scenario", "experiment"),
            data=take("data", "sg"),
            models=as_list(take("models", take("model", "dist"))),
            params=[float(v) for v in as_list(take("params", "1"))],
            ns=[int(v) for v in as_list(take("n", "135"))],
            reps=int(take("reps", "30")),
            trials=int(take("trials", "20")),
            master_seed=int(take("master_seed", "0")),
            solver=take("solver", "auto"),
            mode=take("mode", "effective"),
            block_scale=float(scale_raw) if scale_raw is not None else None,
            out=take("out", "results"),
        )
    except ValueError as exc:
        raise InputError(f"bad value in config: {exc}") from exc
    if values:
        raise InputError(f"unknown config keys: {sorted(values)}")
    return cfg


@dataclass
class CellResult:
    scenario: str
    model: str
    param: float
    n: int
    m: int
    pods: list[float] = field(default_factory=list)
    bound5s: list[float] = field(default_factory=list)
    lottery_means: list[float] = field(default_factory=list)
    lottery_roms: list[float] = field(default_factory=list)
    all_ratios: list[float] = field(default_factory=list)
    opts: list[float] = field(default_factory=list)
    opt_cs: list[float] = field(default_factory=list)
    betas: list[float] = field(default_factory=list)
    bound4_eff: float = math.nan
    lower_bound_only: int = 0
    errors: list[str] = field(default_factory=list)

    def row(self) -> dict:
        def agg(xs):
            finite = [x for x in xs if not math.isinf(x) and not math.isnan(x)]
            if not finite:
                return math.nan, math.nan
            mean = math.fsum(finite) / len(finite)
            if len(finite) > 1:
                se = math.sqrt(math.fsum((x - mean) ** 2 for x in finite)
                               / (len(finite) - 1) / len(finite))
            else:
                se = 0.0
            return mean, se
        mean_pod, se_pod = agg(self.pods)
        mean_b5, _ = agg(self.bound5s)
        mean_lr, se_lr = agg(self.lottery_means)
        mean_rom, _ = agg(self.lottery_roms)
        _, se_pooled = agg(self.all_ratios)
        mean_opt, _ = agg(self.opts)
        mean_opt_c, _ = agg(self.opt_cs)
        mean_beta, _ = agg(self.betas)
        return {
            "scenario": self.scenario, "model": self.model, "param": self.param,
            "n": self.n, "m": self.m, "rep_count": len(self.pods),
            "mean_pod": mean_pod, "se_pod": se_pod, "mean_bound5": mean_b5,
            "mean_lottery_ratio": mean_lr, "se_lottery_ratio": se_lr,
            "se_lottery_ratio_pooled": se_pooled,
            "mean_lottery_ratio_of_means": mean_rom,
            "mean_opt": mean_opt, "mean_opt_c": mean_opt_c, "mean_beta": mean_beta,
            "bound4_effective": self.bound4_eff,
            "lower_bound_only": self.lower_bound_only,
            "errors": "; ".join(self.errors),
        }


def _run_rep(dataset: GeoDataset, cell: CellResult, cfg: ExperimentConfig,
             rep: int, cell_seed: int) -> tuple[int, dict]:
    rep_seed = derive_seed(cell_seed, rep)
    gen_cfg_kwargs = {"model": cell.model, "n": cell.n,
                      "seed": derive_seed(rep_seed, 0)}
    if cell.model == "proj":
        gen_cfg_kwargs["rho_km"] = cell.param
    else:
        gen_cfg_kwargs["sigma2"] = cell.param
    inst = generate(dataset, ModelConfig(**gen_cfg_kwargs))
    method = cfg.solver
    if method == "auto":
        method = choose_exact_method(inst)
    solver_opts = {"time_budget": 300.0} if method == "exact" else {}
    relaxed = solve_unconstrained(inst)
    constrained = solve(inst, method, **solver_opts)
    if not constrained.optimal:
        # budget ran out: the incumbent only lower-bounds the optimum
        opt = relaxed.objective
        summary = lottery_monte_carlo(inst, cfg.trials, derive_seed(rep_seed, 1), opt=opt)
        return rep, {"lower_bound_only": True, "opt": opt,
                     "opt_c": constrained.objective,
                     "pod": opt / constrained.objective if constrained.objective > 0 else math.inf,
                     "bound5": math.nan, "beta": math.nan,
                     "bound4_eff": math.nan,
                     "lottery_mean_ratio": summary.mean_ratio,
                     "lottery_rom": summary.ratio_of_means,
                     "ratios": [r["ratio"] for r in summary.records]}
    report = assemble_report(inst, relaxed, constrained, mode=cfg.mode)
    summary = lottery_monte_carlo(inst, cfg.trials, derive_seed(rep_seed, 1),
                                  opt=report.opt, opt_c=report.opt_c)
    tol = 1e-9 * max(1.0, report.pod if not math.isinf(report.pod) else 1.0)
    if not math.isinf(report.bound_thm4_effective):
        assert report.pod <= report.bound_thm4_effective + tol, \
            f"ratio {report.pod} exceeds cap bound {report.bound_thm4_effective}"
    if not math.isinf(report.bound_thm5):
        assert report.pod <= report.bound_thm5 + tol, \
            f"ratio {report.pod} exceeds disparity bound {report.bound_thm5}"
    return rep, {"lower_bound_only": False, "opt": report.opt, "opt_c": report.opt_c,
                 "pod": report.pod, "bound5": report.bound_thm5, "beta": report.beta,
                 "bound4_eff": report.bound_thm4_effective,
                 "lottery_mean_ratio": summary.mean_ratio,
                 "lottery_rom": summary.ratio_of_means,
                 "ratios": [r["ratio"] for r in summary.records]}


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> list[dict]:
    """Execute the full grid; returns one result row per cell, grid order."""
    dataset = load_geodata(cfg.data)
    if cfg.block_scale:
        dataset = scale_blocks(dataset, cfg.block_scale)
    m = sum(dataset.block_sizes)
    cells: list[CellResult] = []
    cell_index = 0
    for model in cfg.models:
        for param in cfg.params:
            for n in cfg.ns:
                cell = CellResult(cfg.scenario, model, param, n, m)
                cell_seed = derive_seed(cfg.master_seed, cell_index)
                cell_index += 1
                jobs = range(cfg.reps)
                if threads > 1:
                    with ThreadPoolExecutor(max_workers=threads) as pool:
                        futures = [(rep, pool.submit(_run_rep, dataset, cell, cfg,
                                                     rep, cell_seed))
                                   for rep in jobs]
                        outcomes = []
                        for rep, fut in futures:
                            try:
                                outcomes.append(fut.result())
                            except Exception as exc:  # recorded, not fatal
                                outcomes.append((rep, {"error": f"rep {rep}: {exc}"}))
                else:
                    outcomes = []
                    for rep in jobs:
                        try:
                            outcomes.append(_run_rep(dataset, cell, cfg, rep, cell_seed))
                        except Exception as exc:
                            outcomes.append((rep, {"error": f"rep {rep}: {exc}"}))
                for rep, out in sorted(outcomes, key=lambda t: t[0]):
                    if "error" in out:
                        cell.errors.append(out["error"])
                        continue
                    if out["lower_bound_only"]:
                        cell.lower_bound_only += 1
                    cell.pods.append(out["pod"])
                    cell.bound5s.append(out["bound5"])
                    cell.betas.append(out["beta"])
                    cell.opts.append(out["opt"])
                    cell.opt_cs.append(out["opt_c"])
                    cell.lottery_means.append(out["lottery_mean_ratio"])
                    cell.lottery_roms.append(out["lottery_rom"])
                    cell.all_ratios.extend(out["ratios"])
                    if not math.isnan(out["bound4_eff"]):
                        cell.bound4_eff = out["bound4_eff"]
                cells.append(cell)
    rows = [cell.row() for cell in cells]
    if all(row["rep_count"] == 0 for row in rows):
        raise InputError("every experiment cell failed; see the errors column")
    return rows


def write_results(rows: list[dict], out_dir: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "results.csv")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return path


def render_figures(rows: list[dict], out_dir: str) -> list[str]:
    """One grouped-bar chart per (model, n): ratio, disparity bound, and
    lottery loss across parameter values, with standard-error whiskers."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(out_dir, exist_ok=True)
    paths = []
    groups: dict[tuple[str, str, int], list[dict]] = {}
    for row in rows:
        groups.setdefault((row["scenario"], row["model"], row["n"]), []).append(row)
    for (scenario, model, n), group in groups.items():
        group = sorted(group, key=lambda r: r["param"])
        params = [r["param"] for r in group]
        x = np.arange(len(params))
        width = 0.27
        fig, ax = plt.subplots(figsize=(6, 3.2))
        ax.bar(x - width, [r["mean_pod"] for r in group], width,
               yerr=[r["se_pod"] for r in group], capsize=3,
               label="welfare ratio", color="#4c9e4c")
        ax.bar(x, [r["mean_lottery_ratio"] for r in group], width,
               yerr=[r["se_lottery_ratio"] for r in group], capsize=3,
               label="lottery loss", color="#c25150")
        ax.bar(x + width, [r["mean_bound5"] for r in group], width,
               label="disparity bound", color="#4c6fae")
        ax.set_xticks(x)
        ax.set_xticklabels([f"{p:g}" for p in params])
        ax.set_xlabel("model parameter")
        ax.axhline(1.0, color="black", linewidth=0.6)
        ax.set_title(f"{scenario}: {model}, n={n}")
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = os.path.join(out_dir, f"fig_{scenario}_{model}_n{n}.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        paths.append(path)
    return paths
