"""Command-line front end: config parsing, dispatch, deterministic output.

Commands: grid, shadow-curve, clifford-verify, mbl-cage, identity-suite.
Values may come from a JSON config file and/or flags; flags win. Every run
writes its data files plus a manifest with content hashes, and reruns with
the same config and seed are byte-identical.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .cliffordverify import clifford_convergence_experiment, summarize_convergence
from .infotheory import (
    Ensemble,
    chi2,
    haar_moment_mc,
    q2_contour,
    q2_from_purity_value,
    q2_purity,
    q2_spectral,
    random_density,
    random_spectrum,
    subentropy,
    von_neumann,
)
from .models import MBL_W_DEFAULT, ModelSpec, draw_disorder
from .qhilbert import DensityOperator, SiteSubset, spectrum_of
from .scramble import (
    ScrambleScenario,
    default_perturbation_site,
    default_time_grid,
    exact_metric_grid,
    mbl_cage_compare,
    shadow_metric_curve,
)
from .seeding import substream_rng

COMMANDS = ("grid", "shadow-curve", "clifford-verify", "mbl-cage", "identity-suite")

_MODEL_KINDS = {"tfim": "TFIM", "mfim": "MFIM", "pxp": "PXP", "mbl": "MBL"}


class UsageError(ValueError):
    """Bad configuration or flags; reported as a usage failure."""


@dataclass
class RunConfig:
    command: str
    model: str | None = None
    length: int | None = None
    subsystem_size: int = 2
    site: int | None = None
    shots: int | None = None
    batches: int = 10
    seed: int = 0
    tmax: float = 30.0
    steps: int = 301
    out: str = "out"
    format: str = "csv"
    initial: str | None = None
    policy: str = "windows_containing_x"
    metrics: list = field(default_factory=lambda: ["chi2", "holevo", "chi_q"])
    disorder_seed: int = 42
    disorder_width: float = MBL_W_DEFAULT
    pxp_boundary: str = "open_projected"
    sample_counts: list = field(default_factory=lambda: [10, 50, 200])
    trials: int = 5
    cage_start: int | None = None
    cage_length: int = 3
    boundary_scale: float = 1.0
    n_spectra: int = 1000
    n_triples: int = 10000
    n_haar: int = 100000

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.format not in ("csv", "json"):
            raise UsageError(f"unknown format {self.format!r}")
        if self.seed is None:
            raise UsageError("master seed must be set (no wall-clock seeding)")
        needs_model = self.command in ("grid", "shadow-curve")
        if needs_model and self.model is None:
            raise UsageError("missing required field: model")
        if self.command != "identity-suite" and self.length is None:
            raise UsageError("missing required field: length")
        if self.command == "shadow-curve" and self.shots is None:
            raise UsageError("missing required field: shots")
        if self.model is not None and self.model.lower() not in _MODEL_KINDS:
            raise UsageError(f"unknown model {self.model!r}")
        if self.length is not None and self.subsystem_size > self.length:
            raise UsageError("subsystem_size exceeds chain length")


_FLAG_TO_KEY = {
    "model": "model",
    "length": "length",
    "subsystem_size": "subsystem_size",
    "site": "site",
    "shots": "shots",
    "batches": "batches",
    "seed": "seed",
    "tmax": "tmax",
    "steps": "steps",
    "out": "out",
    "format": "format",
}


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="scramblescope",
        description="Information-scrambling simulations and randomized-probe estimates",
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", type=str, default=None, help="JSON config file")
    p.add_argument("--model", type=str)
    p.add_argument("--length", type=int)
    p.add_argument("--subsystem-size", dest="subsystem_size", type=int)
    p.add_argument("--site", type=int)
    p.add_argument("--shots", type=int)
    p.add_argument("--batches", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--tmax", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--out", type=str)
    p.add_argument("--format", type=str)
    return p


def parse_config(argv) -> RunConfig:
    """Merge defaults, an optional JSON config file, and flags (flags win)."""
    ns = _build_parser().parse_args(argv)
    values = {"command": ns.command}
    if ns.config is not None:
        try:
            file_values = json.loads(Path(ns.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file: {exc}") from exc
        known = {f.name for f in fields(RunConfig)}
        for key, value in file_values.items():
            if key not in known or key == "command":
                raise UsageError(f"unknown config key {key!r}")
            values[key] = value
    for flag, key in _FLAG_TO_KEY.items():
        flag_value = getattr(ns, flag if flag != "subsystem_size" else "subsystem_size")
        if flag_value is not None:
            values[key] = flag_value
    try:
        return RunConfig(**values)
    except TypeError as exc:
        raise UsageError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Scenario assembly and output helpers.


def _model_spec(cfg: RunConfig, kind: str) -> ModelSpec:
    disorder = None
    if kind == "MBL":
        disorder = draw_disorder(cfg.length, W=cfg.disorder_width, seed=cfg.disorder_seed)
    return ModelSpec(
        kind=kind,
        n_sites=cfg.length,
        couplings={},
        disorder=disorder,
        pxp_boundary=cfg.pxp_boundary,
    )


def _scenario(cfg: RunConfig, kind: str, metrics, policy=None) -> ScrambleScenario:
    initial = cfg.initial
    if initial is None:
        initial = "neel" if kind in ("PXP", "MBL") else "polarized"
    site = cfg.site
    if site is None:
        site = default_perturbation_site(kind, cfg.length)
    return ScrambleScenario(
        model=_model_spec(cfg, kind),
        initial_kind=initial,
        perturbation_site=site,
        subsystem_size=cfg.subsystem_size,
        time_grid=default_time_grid(cfg.tmax, cfg.steps),
        subset_policy=policy if policy is not None else cfg.policy,
        metrics=tuple(metrics),
        shots=cfg.shots,
        master_seed=cfg.seed,
        n_batches=cfg.batches,
    )


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


def _write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def _write_rows(path: Path, header, rows, fmt: str) -> None:
    if fmt == "csv":
        _write_csv(path, header, rows)
    else:
        records = [dict(zip(header, row)) for row in rows]
        path.write_text(json.dumps(records, indent=1) + "\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(out_dir: Path, cfg: RunConfig, extra: dict, outputs) -> None:
    manifest = {
        "version": __version__,
        "command": cfg.command,
        "config": {f.name: getattr(cfg, f.name) for f in fields(cfg)},
        "units": "nats",
        "outputs": {p.name: _sha256(p) for p in outputs},
    }
    manifest.update(extra)
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Commands.


def _cmd_grid(cfg: RunConfig, out_dir: Path) -> list[Path]:
    kind = _MODEL_KINDS[cfg.model.lower()]
    scenario = _scenario(cfg, kind, cfg.metrics)
    result = exact_metric_grid(scenario)
    rows = []
    for mi, metric in enumerate(result.metrics):
        for ti, t in enumerate(result.time_grid):
            for ci, x in enumerate(result.sites):
                rows.append((metric, float(t), int(x), float(result.values[mi, ti, ci])))
    ext = "csv" if cfg.format == "csv" else "json"
    path = out_dir / f"grid.{ext}"
    _write_rows(path, ("metric", "t", "x", "value"), rows, cfg.format)
    _write_manifest(out_dir, cfg, {"scenario": result.metadata}, [path])
    return [path]


def _cmd_shadow_curve(cfg: RunConfig, out_dir: Path) -> list[Path]:
    kind = _MODEL_KINDS[cfg.model.lower()]
    scenario = _scenario(cfg, kind, ("chi2",), policy="all_subsets")
    rows = shadow_metric_curve(scenario)
    table = [(r["t"], r["L_A"], r["chi2_shadow"], r["chi2_exact"]) for r in rows]
    ext = "csv" if cfg.format == "csv" else "json"
    path = out_dir / f"shadow_curve.{ext}"
    _write_rows(path, ("t", "L_A", "chi2_shadow", "chi2_exact"), table, cfg.format)
    _write_manifest(out_dir, cfg, {"scenario": scenario.scenario_echo()}, [path])
    return [path]


def _cmd_clifford_verify(cfg: RunConfig, out_dir: Path) -> list[Path]:
    scenario = _scenario(cfg, "PXP", ("chi2",))
    rows = clifford_convergence_experiment(scenario, cfg.sample_counts, cfg.trials)
    table = [
        (r["t"], r["L_A"], r["N"], r["trial"], r["chi2_est"], r["chi2_exact"])
        for r in rows
    ]
    ext = "csv" if cfg.format == "csv" else "json"
    path = out_dir / f"clifford_verify.{ext}"
    _write_rows(
        path, ("t", "L_A", "N", "trial", "chi2_est", "chi2_exact"), table, cfg.format
    )
    summary = summarize_convergence(rows)
    spath = out_dir / f"clifford_summary.{ext}"
    _write_rows(
        spath,
        ("t", "L_A", "N", "chi2_mean", "chi2_std", "chi2_exact"),
        [(r["t"], r["L_A"], r["N"], r["chi2_mean"], r["chi2_std"], r["chi2_exact"]) for r in summary],
        cfg.format,
    )
    _write_manifest(out_dir, cfg, {"scenario": scenario.scenario_echo()}, [path, spath])
    return [path, spath]


def _cmd_mbl_cage(cfg: RunConfig, out_dir: Path) -> list[Path]:
    scenario = _scenario(cfg, "MBL", ("chi2",))
    start = cfg.cage_start
    if start is None:
        start = scenario.perturbation_site - cfg.cage_length // 2
    cage = SiteSubset(range(start, start + cfg.cage_length))
    rows = mbl_cage_compare(cfg.length, cage, scenario, cfg.boundary_scale)
    table = [(r["t"], r["chi2_full"], r["chi2_cage"]) for r in rows]
    ext = "csv" if cfg.format == "csv" else "json"
    path = out_dir / f"mbl_cage.{ext}"
    _write_rows(path, ("t", "chi2_full", "chi2_cage"), table, cfg.format)
    _write_manifest(
        out_dir,
        cfg,
        {"scenario": scenario.scenario_echo(), "cage_sites": list(cage.indices)},
        [path],
    )
    return [path]


def run_identity_suites(
    seed: int, n_spectra: int = 1000, n_triples: int = 10000, n_haar: int = 100000
) -> dict:
    """Numeric property suites for the Q2 identities, concavity and moments."""
    suites = {}

    rng = substream_rng(seed, "identity:spectra")
    worst_spectral = worst_contour = 0.0
    for i in range(n_spectra):
        spec = random_spectrum(int(rng.integers(2, 9)), rng)
        ref = q2_from_purity_value(float(np.sum(spec.values**2)))
        worst_spectral = max(worst_spectral, abs(q2_spectral(spec) - ref))
        worst_contour = max(worst_contour, abs(q2_contour(spec, 2.0, 256) - ref))
    suites["q2_spectral_identity"] = {
        "max_abs_dev": worst_spectral,
        "tolerance": 1e-8,
        "pass": worst_spectral < 1e-8,
    }
    suites["q2_contour_identity"] = {
        "max_abs_dev": worst_contour,
        "tolerance": 1e-6,
        "pass": worst_contour < 1e-6,
    }

    rng = substream_rng(seed, "identity:concavity")
    worst_gap = 0.0
    min_chi2 = math.inf
    per_dim = max(1, n_triples // 3)
    for d in (2, 4, 8):
        for i in range(per_dim):
            rho0 = random_density(d, rng)
            rho1 = random_density(d, rng)
            lam = float(rng.uniform())
            mix = DensityOperator(d, lam * rho0.matrix + (1 - lam) * rho1.matrix)
            gap = (
                lam * q2_purity(rho0)
                + (1 - lam) * q2_purity(rho1)
                - q2_purity(mix)
            )
            worst_gap = max(worst_gap, gap)
            min_chi2 = min(
                min_chi2, chi2(Ensemble([(0.5, rho0), (0.5, rho1)]))
            )
    suites["q2_concavity"] = {
        "max_violation": worst_gap,
        "min_chi2": min_chi2,
        "tolerance": 1e-12,
        "pass": worst_gap < 1e-12 and min_chi2 > -1e-10,
    }

    rng = substream_rng(seed, "identity:haar")
    haar_ok = True
    haar_report = []
    for d in (2, 4):
        rho = random_density(d, rng)
        moments = haar_moment_mc(rho, n_haar, rng)
        p = float(np.sum(np.abs(rho.matrix) ** 2))
        expect_marginal = (p + 1.0) / (d + 1.0)
        expect_pure = 2.0 / (d + 1.0)
        dev_m = abs(moments.marginal - expect_marginal)
        dev_p = abs(moments.pure - expect_pure)
        ok = dev_m < 3 * moments.marginal_se and dev_p < 3 * moments.pure_se
        haar_ok = haar_ok and ok
        haar_report.append(
            {
                "d": d,
                "marginal": moments.marginal,
                "marginal_expected": expect_marginal,
                "marginal_se": moments.marginal_se,
                "pure": moments.pure,
                "pure_expected": expect_pure,
                "pure_se": moments.pure_se,
                "pass": ok,
            }
        )
    suites["haar_moments"] = {"cases": haar_report, "pass": haar_ok}

    rng = substream_rng(seed, "identity:ordering")
    order_ok = True
    for i in range(500):
        rho = random_density(int(2 ** rng.integers(1, 4)), rng)
        spec = spectrum_of(rho)
        q = subentropy(spec)
        s = von_neumann(rho)
        order_ok = order_ok and -1e-10 <= q <= s + 1e-10
        order_ok = order_ok and -1e-12 <= q2_purity(rho) <= math.log(2.0) + 1e-12
    suites["entropy_ordering"] = {"pass": order_ok}

    suites["pass"] = all(
        v["pass"] for k, v in suites.items() if isinstance(v, dict)
    )
    return suites


def _cmd_identity_suite(cfg: RunConfig, out_dir: Path) -> list[Path]:
    report = run_identity_suites(cfg.seed, cfg.n_spectra, cfg.n_triples, cfg.n_haar)
    path = out_dir / "identity_suite.json"
    path.write_text(json.dumps(report, indent=1, sort_keys=True) + "\n")
    _write_manifest(out_dir, cfg, {}, [path])
    if not report["pass"]:
        raise RuntimeError("identity suite reported failures")
    return [path]


_DISPATCH = {
    "grid": _cmd_grid,
    "shadow-curve": _cmd_shadow_curve,
    "clifford-verify": _cmd_clifford_verify,
    "mbl-cage": _cmd_mbl_cage,
    "identity-suite": _cmd_identity_suite,
}


def max_workers() -> int:
    """Worker cap from SCRAMBLESCOPE_THREADS (execution is sequential today)."""
    try:
        return max(1, int(os.environ.get("SCRAMBLESCOPE_THREADS", "1")))
    except ValueError:
        return 1


def run(cfg: RunConfig) -> int:
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _DISPATCH[cfg.command](cfg, out_dir)
    return 0


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    try:
        cfg = parse_config(argv)
        return run(cfg)
    except UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
