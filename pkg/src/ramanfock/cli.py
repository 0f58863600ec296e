"""Command-line runner.

    ramanfock prepare-fock --preset fig2 --out runs/fig2
    ramanfock reconstruct-wigner --preset fig3 --out runs/fig3
    ramanfock validate-effective --preset fig2 --out runs/adiabatic
    ramanfock photon-stats --config my_run.json --mode mc --seed 7

A config file is JSON. Keys (all optional when a preset supplies them)::

    g_hz, omega_l_hz, delta_hz   ordinary frequencies g/2pi, Omega_L/2pi, delta/2pi
    n_o                          selected subspace
    initial                      "fock:N" or "coherent:RE,IM"
    dim                          Fock-space dimension override
    atoms                        atoms for sequential preparation (default 1)
    n_max                        last photon number of the statistics scan
    grid                         {"extent": 3.5, "step": 0.1} or {"points": [[re, im], ...]}
    delta_over_g                 detuning sweep for validate-effective (default [20, 40, 80])
    interaction_time_s           overrides the pi-time in validate-effective
    mode, seed, atom_count       "det" or "mc" sampling of atom counts
    workers                      threads for grid evaluation

Outputs are comma-separated tables plus a JSON summary. Numbers are written
with 12 significant digits so identical inputs give byte-identical files.

Exit codes: 0 ok, 1 bad configuration, 2 infeasible preparation,
3 truncation, 4 integrator failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .dynamics import analytic_propagate, numeric_propagate_full
from .errors import ConfigError, InfeasiblePreparationError, IntegratorError, TruncationError
from .hilbert import AtomLevel, FieldState, JointState, TruncatedFockSpace, coherent_state, default_dim, fock_state
from .postselect import branch_probabilities, excited_probability
from .protocols import (
    measure_photon_statistics,
    prepare_fock_sequential,
    reconstruct_wigner,
    selectivity_margin,
    square_grid,
)
from .raman import RamanParams, pi_time

log = logging.getLogger("ramanfock")

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_TRUNCATION, EXIT_INTEGRATOR = range(5)

_RYDBERG_PARAMS = {"g_hz": 50e3, "omega_l_hz": 50e3 / 30.0, "delta_hz": 1e6}
PRESETS = {
    "fig2": {**_RYDBERG_PARAMS, "n_o": 5, "initial": f"coherent:{math.sqrt(5.0)!r},0"},
    "fig3": {**_RYDBERG_PARAMS, "n_o": 6, "initial": "fock:6", "grid": {"extent": 3.5, "step": 0.1}},
}


@dataclass(frozen=True)
class RunConfig:
    g_hz: float
    omega_l_hz: float
    delta_hz: float
    n_o: int = 0
    initial: str = "fock:0"
    dim: int | None = None
    atoms: int = 1
    n_max: int | None = None
    grid: dict = field(default_factory=lambda: {"extent": 3.5, "step": 0.1})
    delta_over_g: tuple[float, ...] = (20.0, 40.0, 80.0)
    interaction_time_s: float | None = None
    mode: str = "det"
    seed: int = 0
    atom_count: int = 1000
    workers: int = 1

    def __post_init__(self):
        for name in ("g_hz", "omega_l_hz", "delta_hz"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value < 0:
                raise ConfigError(f"{name} must be a finite non-negative frequency, got {value!r}")
        if self.delta_hz <= 0:
            raise ConfigError("delta_hz must be positive")
        if self.n_o < 0 or self.atoms < 1:
            raise ConfigError("n_o must be >= 0 and atoms >= 1")
        if self.mode not in ("det", "mc"):
            raise ConfigError(f"mode must be 'det' or 'mc', got {self.mode!r}")
        if self.mode == "mc" and self.atom_count < 1:
            raise ConfigError("Monte Carlo mode needs atom_count >= 1")
        parse_initial(self.initial)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = {"g_hz", "omega_l_hz", "delta_hz"} - set(data)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        data = dict(data)
        if "delta_over_g" in data:
            data["delta_over_g"] = tuple(float(x) for x in data["delta_over_g"])
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def params(self) -> RamanParams:
        try:
            return RamanParams.from_hz(self.g_hz, self.omega_l_hz, self.delta_hz)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def parse_initial(text: str) -> tuple[str, complex | int]:
    """``"fock:6"`` -> ``("fock", 6)``; ``"coherent:2.2,0"`` -> ``("coherent", 2.2+0j)``."""
    try:
        kind, _, arg = text.partition(":")
        if kind == "fock":
            n = int(arg)
            if n < 0:
                raise ValueError
            return kind, n
        if kind == "coherent":
            parts = [float(x) for x in arg.split(",")]
            if len(parts) == 1:
                parts.append(0.0)
            re, im = parts
            return kind, complex(re, im)
    except ValueError:
        pass
    raise ConfigError(f"cannot parse initial state {text!r}; expected fock:N or coherent:RE,IM")


def initial_field(cfg: RunConfig, n_top: int = 0, alpha_extra: float = 0.0) -> FieldState:
    kind, arg = parse_initial(cfg.initial)
    if kind == "fock":
        dim = cfg.dim or default_dim(alpha_extra, max(n_top, arg) + 1)
        return fock_state(TruncatedFockSpace(dim), arg)
    dim = cfg.dim or default_dim(max(abs(arg), alpha_extra), n_top)
    return coherent_state(TruncatedFockSpace(dim), arg)


def grid_points(cfg: RunConfig) -> list[complex]:
    grid = cfg.grid
    if "points" in grid:
        return [complex(re, im) for re, im in grid["points"]]
    extent, step = float(grid.get("extent", 3.5)), float(grid.get("step", 0.1))
    if step <= 0 or extent < 0:
        raise ConfigError("grid needs extent >= 0 and step > 0")
    return square_grid(extent, step)


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def _round(x):
    if isinstance(x, dict):
        return {k: _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(fmt(x)) if math.isfinite(x) else str(x)
    return x


def write_table(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def write_summary(path: Path, summary: dict) -> None:
    path.write_text(json.dumps(_round(summary), indent=2, sort_keys=True) + "\n")


def cmd_prepare_fock(cfg: RunConfig, out: Path) -> int:
    params = cfg.params()
    field0 = initial_field(cfg, n_top=cfg.n_o + cfg.atoms)
    report = prepare_fock_sequential(field0, params, cfg.n_o, cfg.atoms)
    first = report if cfg.atoms == 1 else prepare_fock_sequential(field0, params, cfg.n_o, 1)
    n = np.arange(field0.space.dim)
    p0 = field0.probabilities
    summary = {
        "command": "prepare-fock",
        "initial": cfg.initial,
        "dim": field0.space.dim,
        "n_o": cfg.n_o,
        "atoms": cfg.atoms,
        "r": params.r,
        "target_fock": report.target_fock,
        "fidelity": report.fidelity,
        "fidelity_approximation_single_atom": first.approximate_fidelity,
        "excited_probability": report.branch_probabilities[0],
        "success_probability": report.success_probability,
        "branch_probabilities": list(report.branch_probabilities),
        "p_initial_n_o": float(p0[cfg.n_o]),
        "pi_time_s": pi_time(params, cfg.n_o),
        "selectivity_margin": report.selectivity_margin,
        "selectivity_ok": report.selectivity_ok,
        "mode": cfg.mode,
    }
    if cfg.mode == "mc":
        rng = np.random.default_rng(cfg.seed)
        hits = rng.binomial(cfg.atom_count, report.success_probability)
        summary.update(seed=cfg.seed, atom_count=cfg.atom_count, success_fraction_sampled=hits / cfg.atom_count)
    write_summary(out / "prepare_fock_summary.json", summary)
    b = first.b
    write_table(
        out / "prepare_fock_b.csv",
        ["n", "abs_c", "q", "re_b", "im_b", "abs_b", "prefactor", "abs_b_closed_form",
         "sine_arg_propagated", "sine_arg_closed_form"],
        (
            (k, abs(b.initial[k]), b.q[k], b.propagated[k].real, b.propagated[k].imag, abs(b.propagated[k]),
             b.prefactor[k], abs(b.closed_form[k]), b.sine_argument_propagated[k], b.sine_argument_closed_form[k])
            for k in n
        ),
    )
    p1 = report.conditioned.state.probabilities
    write_table(out / "prepare_fock_distribution.csv", ["n", "p_initial", "p_conditioned"], zip(n, p0, p1))
    log.info("fidelity for |%d>: %.6f (P_e = %.6f)", report.target_fock, report.fidelity, report.success_probability)
    return EXIT_OK


def cmd_reconstruct_wigner(cfg: RunConfig, out: Path) -> int:
    params = cfg.params()
    points = grid_points(cfg)
    if not points:
        raise ConfigError("empty Wigner grid")
    field0 = initial_field(cfg)
    grid = reconstruct_wigner(
        field0, params, points, dim=cfg.dim, mode=cfg.mode, atom_count=cfg.atom_count,
        seed=cfg.seed, workers=cfg.workers,
    )
    rows = [
        (p.alpha.real, p.alpha.imag, p.w_reconstructed, p.w_exact, abs(p.w_reconstructed - p.w_exact))
        for p in grid.points
    ]
    write_table(out / "wigner_grid.csv", ["re_alpha", "im_alpha", "w_reconstructed", "w_exact", "abs_diff"], rows)
    max_diff = grid.max_abs_error()
    write_summary(
        out / "wigner_summary.json",
        {
            "command": "reconstruct-wigner",
            "initial": cfg.initial,
            "r": params.r,
            "dim": grid.dim,
            "series_cutoff": grid.series_cutoff,
            "grid_size": len(grid.points),
            "max_abs_diff": max_diff,
            "max_abs_diff_over_2_pi": max_diff / (2 / math.pi),
            "max_tail_mass": max(p.tail_mass for p in grid.points),
            "mode": cfg.mode,
            "seed": cfg.seed if cfg.mode == "mc" else None,
        },
    )
    log.info("max |W_rec - W_exact| = %.3g over %d points", max_diff, len(grid.points))
    return EXIT_OK


def _compare_models(params: RamanParams, cfg: RunConfig, field0: FieldState) -> dict:
    t = cfg.interaction_time_s
    if t is None:
        t = pi_time(params, cfg.n_o)
        if not math.isfinite(t):
            # no Raman coupling: any time is as good as another
            t = 10 * 2 * math.pi / params.delta
    eff = analytic_propagate(JointState.product(AtomLevel.G, field0, 2), params, cfg.n_o, t)
    full = numeric_propagate_full(JointState.product(AtomLevel.G, field0, 3), params, cfg.n_o, t)
    pe_eff = excited_probability(eff.state)
    probs = branch_probabilities(full.state)
    return {
        "delta_over_g": params.delta / params.g if params.g else math.inf,
        "time_s": t,
        "pe_full": float(probs[AtomLevel.E]),
        "pe_effective": pe_eff,
        "abs_diff": abs(float(probs[AtomLevel.E]) - pe_eff),
        "h_leakage": float(probs[AtomLevel.H]),
        "steps": full.steps,
        "norm_drift": full.norm_drift,
    }


def cmd_validate_effective(cfg: RunConfig, out: Path) -> int:
    params = cfg.params()
    field0 = initial_field(cfg, n_top=cfg.n_o + 1)
    base = _compare_models(params, cfg, field0)
    rows = []
    if params.g > 0 and params.omega_l > 0:
        for ratio in cfg.delta_over_g:
            if cfg.interaction_time_s is None and math.isclose(ratio, base["delta_over_g"], rel_tol=1e-12):
                rows.append(base)
                continue
            swept = RamanParams(params.g, params.omega_l, ratio * params.g)
            rows.append(_compare_models(swept, replace(cfg, interaction_time_s=None), field0))
    cols = ["delta_over_g", "time_s", "pe_full", "pe_effective", "abs_diff", "h_leakage", "steps", "norm_drift"]
    write_table(out / "validate_effective.csv", cols, ([row[c] for c in cols] for row in [base] + rows))
    diffs = [row["abs_diff"] for row in rows]
    write_summary(
        out / "validate_effective_summary.json",
        {
            "command": "validate-effective",
            "initial": cfg.initial,
            "dim": field0.space.dim,
            "r": params.r,
            **base,
            "sweep_abs_diff": diffs,
            "sweep_monotone_decreasing": all(b < a for a, b in zip(diffs, diffs[1:])),
        },
    )
    log.info("|P_e(full) - P_e(effective)| = %.3g", base["abs_diff"])
    return EXIT_OK


def cmd_photon_stats(cfg: RunConfig, out: Path) -> int:
    params = cfg.params()
    field0 = initial_field(cfg, n_top=cfg.n_max or 0)
    dim = field0.space.dim
    n_max = dim - 2 if cfg.n_max is None else cfg.n_max
    if n_max >= dim - 1:
        raise TruncationError(f"n_max={n_max} needs dim > {n_max + 1}, have {dim}")
    rng = np.random.default_rng(cfg.seed) if cfg.mode == "mc" else None
    est = measure_photon_statistics(field0, params, n_max, mode=cfg.mode, atom_count=cfg.atom_count, rng=rng)
    true = field0.probabilities[: n_max + 1]
    write_table(
        out / "photon_stats.csv",
        ["N", "p_excited", "p_true", "abs_error"],
        ((n, est[n], true[n], abs(est[n] - true[n])) for n in range(n_max + 1)),
    )
    write_summary(
        out / "photon_stats_summary.json",
        {
            "command": "photon-stats",
            "initial": cfg.initial,
            "dim": dim,
            "n_max": n_max,
            "r": params.r,
            "max_abs_error": float(np.max(np.abs(est - true))),
            "peak_n": int(np.argmax(est)),
            "sum_p_excited": float(est.sum()),
            "selectivity_margin_at_n_max": selectivity_margin(params, n_max),
            "mode": cfg.mode,
            "seed": cfg.seed if cfg.mode == "mc" else None,
        },
    )
    return EXIT_OK


COMMANDS = {
    "prepare-fock": cmd_prepare_fock,
    "reconstruct-wigner": cmd_reconstruct_wigner,
    "validate-effective": cmd_validate_effective,
    "photon-stats": cmd_photon_stats,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ramanfock", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="JSON run configuration")
        p.add_argument("--preset", choices=sorted(PRESETS))
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--seed", type=int)
        p.add_argument("--mode", choices=["det", "mc"])
        p.add_argument("--workers", type=int)
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def load_config(args) -> RunConfig:
    data = dict(PRESETS[args.preset]) if args.preset else {}
    if args.config is not None:
        try:
            data.update(json.loads(args.config.read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    for key in ("seed", "mode", "workers"):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    if not data:
        raise ConfigError("give --preset and/or --config")
    return RunConfig.from_dict(data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args)
        args.out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasiblePreparationError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except TruncationError as exc:
        print(f"truncation: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except IntegratorError as exc:
        print(f"integrator: {exc}", file=sys.stderr)
        return EXIT_INTEGRATOR


if __name__ == "__main__":
    sys.exit(main())
