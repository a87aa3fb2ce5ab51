#!/usr/bin/env python3
"""
nfbt - near-field beam training simulator

Subcommands:
    pattern         beam-pattern, support-width and L-approximation CSVs
    estimate        one scheme on one channel, JSON report
    mc              Monte Carlo sweep, per-trial and summary CSVs
    codebook-cache  build, store and verify serialized codebooks

Usage:
    python cli.py mc --config config/nmse_vs_snr.json --out output/nmse --threads 4

Exit codes: 0 success, 2 configuration error, 3 infeasible experiment,
4 internal numeric failure. Diagnostics go to stderr; stdout carries only
machine-readable output.
"""

import contextlib
import functools
import json
import logging
import sys
from pathlib import Path
from typing import Optional

import click
import numpy as np
import pandas as pd
from pydantic import ValidationError
from rich.console import Console
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn
from rich.table import Table

from config import get_settings
from eval_harness import MonteCarloHarness, summarize, write_csv, write_summary_groups
from logging_config import log_error, setup_logging
from models.cli_config import CliConfig
from models.errors import (
    BeamTrainingError, CodebookCacheError, ConfigError, InfeasibleExperimentError
)
from models.schemas import CodebookKind, SchemeSpec, UserLocation
from storage.codebook_cache import describe, get_cache
from tools.array_model import dbm_to_watts, noise_power_for_snr, synthesize_channel
from tools.beam_pattern import range_insensitive_window, scan_pattern, support_width_curve
from tools.codebooks import build_dft_codebook, build_polar_codebook
from tools.fresnel_kernel import approximation_curve, mu_curve, mu_search_grid
from workflows.training_schemes import BeamTrainer

logger = logging.getLogger("nfbt")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERIC = 4

stderr_console = Console(stderr=True)


def load_config(path: str) -> CliConfig:
    config_path = Path(path)
    if not config_path.is_file():
        raise ConfigError(f"config file not found: {config_path}")
    try:
        return CliConfig.model_validate_json(config_path.read_text(encoding="utf-8"))
    except ValidationError as exc:
        raise ConfigError(f"invalid config {config_path}:\n{exc}") from exc


def resolve_seed(flag: Optional[int], cfg: CliConfig) -> int:
    """--seed beats NFBT_SEED, which beats the config file."""
    if flag is not None:
        return flag
    env_seed = get_settings().seed
    return env_seed if env_seed is not None else cfg.seed


def resolve_out(flag: Optional[str], cfg: CliConfig) -> Path:
    return Path(flag or cfg.out_dir or get_settings().output_dir)


def resolve_threads(flag: Optional[int], cfg: CliConfig) -> int:
    return flag or cfg.threads or get_settings().threads


def guarded(command):
    """Map package errors onto the documented exit codes."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            command(*args, **kwargs)
        except (ConfigError, ValidationError) as exc:
            log_error(ctx.info_name, exc)
            ctx.exit(EXIT_CONFIG)
        except InfeasibleExperimentError as exc:
            log_error(ctx.info_name, exc)
            ctx.exit(EXIT_INFEASIBLE)
        except (BeamTrainingError, ArithmeticError, ValueError) as exc:
            log_error(ctx.info_name, exc)
            ctx.exit(EXIT_NUMERIC)

    return wrapper


@contextlib.contextmanager
def config_values(what: str):
    """ValueErrors raised while building objects from config values become ConfigErrors."""
    try:
        yield
    except ValueError as exc:
        raise ConfigError(f"{what}: {exc}") from exc


def common_options(command):
    command = click.option("--threads", type=click.IntRange(min=1), default=None,
                           help="Worker threads (default: config value).")(command)
    command = click.option("--seed", type=click.IntRange(min=0), default=None,
                           help="Master seed; overrides NFBT_SEED and the config file.")(command)
    command = click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None,
                           help="Output directory.")(command)
    command = click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False),
                           help="JSON experiment configuration.")(command)
    return command


@click.group()
@click.option("-v", "--verbose", count=True, help="-v for INFO detail, -vv for DEBUG.")
@click.option("--quiet", is_flag=True, help="Only warnings and errors on stderr.")
def cli(verbose: int, quiet: bool):
    """Near-field beam training with DFT codebooks."""
    settings = get_settings()
    level = settings.log_level
    if quiet:
        level = "WARNING"
    elif verbose >= 2:
        level = "DEBUG"
    elif verbose == 1:
        level = "INFO"
    setup_logging(level=level, log_file=settings.log_file, enable_file=settings.log_file is not None)


@cli.command("pattern")
@common_options
@guarded
def cmd_pattern(config_path, out_dir, seed, threads):
    """Beam-pattern scans, surrogate width curves and L(mu, a) curves."""
    cfg = load_config(config_path)
    with config_values("pattern"):
        array = cfg.array()
        mu_grid = mu_search_grid(array, cfg.range_step_m)
    if not cfg.pattern_ranges_m:
        raise ConfigError("pattern_ranges_m is empty")
    if not cfg.pattern_angles:
        raise ConfigError("pattern_angles is empty")
    for r in cfg.pattern_ranges_m:
        if not 0 < r <= array.rayleigh_dist:
            raise ConfigError(f"pattern range {r} m outside (0, {array.rayleigh_dist:.2f}] m")

    out = resolve_out(out_dir, cfg)
    pattern_rows, width_rows, approx_rows = [], [], []
    for theta in cfg.pattern_angles:
        for r in cfg.pattern_ranges_m:
            loc = UserLocation(spatial_angle=theta, range=r)
            omegas, gains = scan_pattern(array, loc, cfg.pattern_scan_step)
            pattern_rows.append(pd.DataFrame({
                "theta": theta, "range_m": r, "omega": omegas, "normalized_gain": gains,
            }))
            if abs(theta) < 1.0:
                phis = np.clip(theta + np.linspace(-0.2, 0.2, 801), -1.0, 1.0)
                curve = approximation_curve(array, loc, phis)
                approx_rows.append(pd.DataFrame({
                    "theta": theta, "range_m": r, "phi": curve[:, 0],
                    "ratio_exact": curve[:, 1], "ratio_approx": curve[:, 2],
                }))

        curve = support_width_curve(array, theta, cfg.pattern_ranges_m, cfg.power_threshold,
                                    cfg.pattern_scan_step)
        width_rows.extend({"theta": theta, "range_m": r, "width": w} for r, w in curve)
        if len(curve) >= 2 and curve[-1][0] - curve[0][0] >= cfg.pattern_window_m:
            try:
                start, end, change = range_insensitive_window(curve, cfg.pattern_window_m)
                logger.info(f"theta={theta}: flattest {cfg.pattern_window_m:g} m window "
                            f"[{start:g}, {end:g}] m, width change {change:.2e}")
            except ValueError as exc:
                logger.info(f"theta={theta}: no window report ({exc})")

    mu_rows = []
    for a in cfg.pattern_mu_offsets:
        rows = mu_curve(a, array.n_antennas, mu_grid)
        mu_rows.append(pd.DataFrame({"a": a, "mu": rows[:, 0], "ratio_approx": rows[:, 1]}))

    write_csv(pd.concat(pattern_rows, ignore_index=True), out / "beam_pattern.csv")
    write_csv(pd.DataFrame(width_rows, columns=["theta", "range_m", "width"]), out / "support_width.csv")
    if approx_rows:
        write_csv(pd.concat(approx_rows, ignore_index=True), out / "ratio_approximation.csv")
    if mu_rows:
        write_csv(pd.concat(mu_rows, ignore_index=True), out / "ratio_vs_mu.csv")
    logger.info(f"✅ Pattern CSVs written to {out}")


@cli.command("estimate")
@common_options
@guarded
def cmd_estimate(config_path, out_dir, seed, threads):
    """Run one scheme on one synthesized channel and emit its JSON report."""
    cfg = load_config(config_path)
    master_seed = resolve_seed(seed, cfg)
    rng = np.random.default_rng(np.random.SeedSequence(master_seed))
    with config_values("estimate"):
        array = cfg.array()
        scheme = SchemeSpec.model_validate(cfg.estimate_scheme)
        tx_power = dbm_to_watts(cfg.tx_power_dbm)
        loc = UserLocation(spatial_angle=cfg.estimate_angle, range=cfg.estimate_range_m)
        channel = synthesize_channel(array, loc, cfg.rician_db, cfg.ref_gain_db, cfg.n_nlos, rng)
        if cfg.estimate_noiseless:
            noise_power = 0.0
        elif cfg.estimate_snr_db is not None:
            noise_power = noise_power_for_snr(array, tx_power, cfg.estimate_snr_db, cfg.ref_gain_db, loc.range)
        else:
            noise_power = dbm_to_watts(cfg.noise_dbm)

        trainer = BeamTrainer(
            array, tx_power,
            n_candidates=cfg.n_candidates,
            polar=cfg.polar(),
            power_threshold=cfg.power_threshold,
            range_step=cfg.range_step_m,
            far_field_shortcut=cfg.far_field_shortcut,
        )
    report = trainer.run(scheme, channel, noise_power, rng).model_copy(update={"seed": master_seed})

    payload = report.to_json_dict()
    payload["theta_true"] = loc.spatial_angle
    payload["r_true"] = loc.range
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out_dir is None:
        sys.stdout.write(text)
    else:
        path = Path(out_dir) / "estimate.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info(f"✅ Report written to {path}")


def _print_summary(rows) -> None:
    table = Table(title="Monte Carlo summary", show_lines=False)
    for column in ("scheme", "sweep", "NMSE angle", "NMSE range", "rate", "eff. rate", "T_tra"):
        table.add_column(column, justify="right")
    for row in rows:
        table.add_row(
            row.scheme,
            f"{row.sweep_value:g}",
            f"{row.nmse_angle:.3e}",
            "-" if row.nmse_range is None else f"{row.nmse_range:.3e}",
            f"{row.mean_rate:.3f}",
            f"{row.mean_eff_rate:.3f}",
            str(row.n_training_symbols),
        )
    stderr_console.print(table)


@cli.command("mc")
@common_options
@guarded
def cmd_mc(config_path, out_dir, seed, threads):
    """Monte Carlo sweep over the configured schemes."""
    cfg = load_config(config_path)
    with config_values("mc"):
        spec = cfg.experiment_spec(seed=resolve_seed(seed, cfg))
    workers = resolve_threads(threads, cfg)
    out = resolve_out(out_dir, cfg)

    with Progress(
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        console=stderr_console,
        transient=True,
    ) as progress:
        task = progress.add_task("trials", total=len(spec.sweep_values) * spec.n_trials)
        harness = MonteCarloHarness(
            spec, threads=workers, progress=lambda done: progress.update(task, completed=done)
        )
        harness.run()

    rows = harness.metrics()
    harness.save_trials_csv(out / "trials.csv")
    harness.save_summary_csv(out / "summary.csv")
    write_summary_groups(summarize(rows), out / "figures")
    (out / "config.json").write_text(cfg.canonical_json() + "\n", encoding="utf-8")
    _print_summary(rows)
    logger.info(f"✅ Monte Carlo results written to {out}")


@cli.command("codebook-cache")
@common_options
@click.option("--kind", type=click.Choice(["dft", "polar", "all"]), default="all", show_default=True)
@click.option("--clear", is_flag=True, help="Delete cached codebooks before rebuilding.")
@guarded
def cmd_codebook_cache(config_path, out_dir, seed, threads, kind, clear):
    """Fill the codebook cache, reusing stored files, and check each one against a fresh build."""
    cfg = load_config(config_path)
    array = cfg.array()
    cache = get_cache(out_dir or cfg.codebook_cache_dir or None)
    if clear:
        cache.clear()

    targets = []
    if kind in ("dft", "all"):
        targets.append((cache.path_for(array, CodebookKind.DFT), cache.get_dft(array), build_dft_codebook(array)))
    if kind in ("polar", "all"):
        params = cfg.polar()
        targets.append((
            cache.path_for(array, CodebookKind.POLAR, params),
            cache.get_polar(array, params),
            build_polar_codebook(array, params),
        ))

    for path, cached, reference in targets:
        if not cache.verify(path, reference):
            raise CodebookCacheError(f"{path}: stored codebook does not match a fresh build")
        logger.info(f"✅ {describe(cached)} -> {path}")


def main() -> None:
    cli(prog_name="nfbt")


if __name__ == "__main__":
    main()
