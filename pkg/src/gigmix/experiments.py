"""Synthetic benchmark: scenario grids, generators, and the run harness.

Scenarios draw from a three-component Gaussian mixture with unit component
variances and means (0, +SNR, -SNR); dataset 1 uses symmetric activation
proportions and dataset 2 positive-only ones. Randomness is split with the
documented rule

    substream(seed, scenario_index, repeat_index)
        = PCG64(SeedSequence(seed, spawn_key=(scenario_index, repeat_index)))

so a manifest (seed + grid + models) reproduces every statistical output
bit-exactly on re-run. Measured wall times are recorded in the manifest but
mirrored into ``runs.csv`` only when timing is switched on, keeping the
default CSV output byte-reproducible.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .distributions import GAMMA_NEG, GAMMA_POS, INVGAMMA_NEG, INVGAMMA_POS
from .evaluation import EvalReport, activation_map, restricted_auc, win_matrix
from .initialization import init_mixture, kmeans_1d
from .io import write_json
from .ml_em import MLFitConfig, fit_ggm, fit_gim
from .vb_em import VBFitConfig, fit_bggm, fit_bgim

MANIFEST_SCHEMA_VERSION = 1

SNR_LEVELS = (2.0, 3.0, 4.0, 5.0)

DATASET_PROPORTIONS = {
    1: {
        1: (0.8, 0.1, 0.1),
        2: (0.9, 0.05, 0.05),
        3: (0.99, 0.005, 0.005),
    },
    2: {
        1: (0.9, 0.1, 0.0),
        2: (0.95, 0.05, 0.0),
        3: (0.99, 0.01, 0.0),
    },
}

MODEL_NAMES = ("bggm", "bgim", "ggm", "gim")

RUNS_CSV_COLUMNS = (
    "scenario_id",
    "model",
    "repeat",
    "auc",
    "pos_frac",
    "neg_frac",
    "seconds",
    "iterations",
    "converged",
)


@dataclass(frozen=True)
class SyntheticSpec:
    """One benchmark scenario."""

    dataset: int
    snr: float
    sparsity: int
    n: int = 10000
    repeats: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.dataset not in DATASET_PROPORTIONS:
            raise ValueError(f"dataset must be 1 or 2, got {self.dataset}")
        if self.sparsity not in (1, 2, 3):
            raise ValueError(f"sparsity must be 1, 2 or 3, got {self.sparsity}")
        if float(self.snr) not in SNR_LEVELS:
            raise ValueError(f"snr must be one of {SNR_LEVELS}, got {self.snr}")
        if self.n < 1 or self.repeats < 1:
            raise ValueError("n and repeats must be >= 1")

    @property
    def pi(self) -> tuple:
        return DATASET_PROPORTIONS[self.dataset][self.sparsity]

    @property
    def scenario_id(self) -> str:
        return f"d{self.dataset}-snr{self.snr:g}-sp{self.sparsity}"


@dataclass
class LabeledDataset:
    values: np.ndarray
    truth: np.ndarray  # component labels in {1, 2, 3}


def substream(seed: int, scenario_index: int, repeat_index: int) -> np.random.Generator:
    """The documented stream-split rule; see the module docstring."""
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(scenario_index, repeat_index))
    )


def _fit_seed(seed: int, scenario_index: int, repeat_index: int) -> int:
    """Initialization seed for the fits of one repeat, split off the data stream."""
    ss = np.random.SeedSequence(seed, spawn_key=(scenario_index, repeat_index, 1))
    return int(ss.generate_state(1, np.uint64)[0] >> 1)


def generate(spec: SyntheticSpec, repeat_index: int, scenario_index: int = 0) -> LabeledDataset:
    """Draw one labeled dataset; deterministic given (seed, indices)."""
    rng = substream(spec.seed, scenario_index, repeat_index)
    labels = rng.choice(np.array([1, 2, 3]), size=spec.n, p=np.asarray(spec.pi))
    means = np.array([0.0, float(spec.snr), -float(spec.snr)])[labels - 1]
    values = rng.normal(means, 1.0)
    return LabeledDataset(values=values, truth=labels)


_ML_FAMILIES = {"ggm": (GAMMA_POS, GAMMA_NEG), "gim": (INVGAMMA_POS, INVGAMMA_NEG)}


def fit_model(model: str, data: np.ndarray, seed: int):
    """Fit one model by name; returns (responsibilities, iterations, converged, seconds)."""
    if model == "bggm":
        r = fit_bggm(data, VBFitConfig(seed=seed))
    elif model == "bgim":
        r = fit_bgim(data, VBFitConfig(seed=seed))
    elif model in _ML_FAMILIES:
        start = time.perf_counter()
        km = kmeans_1d(data, 3, seed)
        init, _ = init_mixture(data, km, _ML_FAMILIES[model])
        r = fit_ggm(data, init, MLFitConfig(seed=seed)) if model == "ggm" else fit_gim(
            data, init, MLFitConfig(seed=seed)
        )
        # Fold the shared k-means initialization into the measured cost.
        r.wall_time_seconds = time.perf_counter() - start
    else:
        raise ValueError(f"unknown model {model!r}; expected one of {MODEL_NAMES}")
    return r.responsibilities, r.iterations, r.converged, r.wall_time_seconds


@dataclass
class RunManifest:
    """Complete provenance of one benchmark invocation."""

    specs: list
    models: list
    timing: str
    rows: list
    failures: list
    schema_version: int = MANIFEST_SCHEMA_VERSION
    version: str = __version__

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "version": self.version,
            "timing": self.timing,
            "models": list(self.models),
            "specs": [
                {
                    "dataset": s.dataset,
                    "snr": float(s.snr),
                    "sparsity": s.sparsity,
                    "n": s.n,
                    "repeats": s.repeats,
                    "seed": s.seed,
                    "scenario_id": s.scenario_id,
                }
                for s in self.specs
            ],
            "failures": list(self.failures),
            "rows": [
                {
                    "scenario_id": r.scenario_id,
                    "model": r.model_id,
                    "repeat": r.run_id,
                    "auc": float(r.auc_restricted),
                    "pos_frac": float(r.pos_fraction),
                    "neg_frac": float(r.neg_fraction),
                    "wall_seconds": float(r.runtime_seconds),
                    "iterations": int(r.iterations),
                    "converged": bool(r.converged),
                }
                for r in self.rows
            ],
        }

    def write_manifest(self, path) -> None:
        write_json(path, self.to_dict())

    def write_runs_csv(self, path) -> None:
        record_timing = self.timing == "wall"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(",".join(RUNS_CSV_COLUMNS) + "\n")
            for r in self.rows:
                seconds = r.runtime_seconds if record_timing else 0.0
                fh.write(
                    f"{r.scenario_id},{r.model_id},{r.run_id},"
                    f"{float(r.auc_restricted)!r},{float(r.pos_fraction)!r},"
                    f"{float(r.neg_fraction)!r},{float(seconds)!r},"
                    f"{int(r.iterations)},{int(r.converged)}\n"
                )

    def auc_table(self) -> dict:
        """scenario -> model -> AUC vector over repeats, ordered by repeat."""
        table = {}
        for r in sorted(self.rows, key=lambda r: (r.scenario_id, r.model_id, r.run_id)):
            table.setdefault(r.scenario_id, {}).setdefault(r.model_id, []).append(
                r.auc_restricted
            )
        return {
            sc: {m: np.asarray(v) for m, v in by_model.items()}
            for sc, by_model in table.items()
        }

    def write_wins_csv(self, path, alpha: float = 0.01) -> None:
        table = win_matrix(self.auc_table(), alpha=alpha)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("model_a,model_b,scenarios_won,scenarios_total,win_pct\n")
            total = len(table.scenarios)
            for ma in table.models:
                for mb in table.models:
                    if ma == mb:
                        continue
                    won = sum(table.wins[(sc, ma, mb)] for sc in table.scenarios)
                    fh.write(f"{ma},{mb},{won},{total},{float(table.win_pct[(ma, mb)])!r}\n")


def load_manifest(path):
    """Recover (specs, models, timing) from a written manifest.

    Together with ``run_benchmark`` this replays a benchmark: every
    statistical field of the rows reproduces bit-exactly (wall times do not,
    which is why they live outside the replayable CSV by default).
    """
    import json

    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("schema_version") != MANIFEST_SCHEMA_VERSION:
        raise ValueError(f"unsupported manifest schema: {doc.get('schema_version')!r}")
    specs = [
        SyntheticSpec(
            dataset=s["dataset"],
            snr=s["snr"],
            sparsity=s["sparsity"],
            n=s["n"],
            repeats=s["repeats"],
            seed=s["seed"],
        )
        for s in doc["specs"]
    ]
    return specs, list(doc["models"]), doc["timing"]


def run_benchmark(specs, models, timing: str = "off") -> RunManifest:
    """Fit every model on every (scenario, repeat) and evaluate each fit.

    All models of one repeat see identical data (required for the paired
    comparisons). Individual fit failures are recorded and skipped; the
    harness keeps going.
    """
    if timing not in ("off", "wall"):
        raise ValueError("timing must be 'off' or 'wall'")
    models = list(models)
    unknown = set(models) - set(MODEL_NAMES)
    if unknown:
        raise ValueError(f"unknown models: {sorted(unknown)}")
    rows = []
    failures = []
    for scenario_index, spec in enumerate(specs):
        for repeat in range(spec.repeats):
            ds = generate(spec, repeat, scenario_index)
            active = ds.truth != 1
            fit_seed = _fit_seed(spec.seed, scenario_index, repeat)
            for model in models:
                try:
                    gamma, iterations, converged, seconds = fit_model(
                        model, ds.values, fit_seed
                    )
                    labels = activation_map(gamma)
                    rows.append(
                        EvalReport(
                            scenario_id=spec.scenario_id,
                            model_id=model,
                            run_id=repeat,
                            auc_restricted=restricted_auc(
                                gamma[:, 1] + gamma[:, 2], active
                            ),
                            pos_fraction=float(np.mean(labels == 1)),
                            neg_fraction=float(np.mean(labels == -1)),
                            runtime_seconds=seconds,
                            iterations=iterations,
                            converged=converged,
                        )
                    )
                except Exception as exc:  # noqa: BLE001 - harness must keep going
                    failures.append(
                        {
                            "scenario_id": spec.scenario_id,
                            "model": model,
                            "repeat": repeat,
                            "error": f"{type(exc).__name__}: {exc}",
                        }
                    )
    return RunManifest(
        specs=list(specs), models=models, timing=timing, rows=rows, failures=failures
    )


def default_grid(seed: int = 0, n: int = 10000, repeats: int = 100) -> list:
    """The full dataset-1 grid: 4 SNR levels x 3 sparsity levels."""
    return [
        SyntheticSpec(dataset=1, snr=snr, sparsity=sp, n=n, repeats=repeats, seed=seed)
        for snr in SNR_LEVELS
        for sp in (1, 2, 3)
    ]
