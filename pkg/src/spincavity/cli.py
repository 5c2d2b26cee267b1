"""Command-line entry point.

    spincavity <command> [--config PATH] [--seed N] [--out PATH]

Commands: sweep (CSV), bsa / teleport / swap / echo / link (JSON lines).
``SPINCAVITY_THREADS`` caps the number of worker processes/threads.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import cavity
from .config import COMMANDS, ConfigError, config_from_dict, load_config
from .gates import Ebs, GateMode, Ideal, Lossy
from .protocols import (
    BellState,
    LinkModel,
    bsa_type1_branches,
    bsa_type2_branches,
    loss_resistance_mc,
    prepare_bell,
    spin_echo_sim,
    swap_type1_branches,
    swap_type2_branches,
    teleport_type1_branches,
    teleport_type2_branches,
)
from .protocols import records
from .protocols.bsa import sample_branch
from .protocols.teleport import mode_name


def worker_count() -> int:
    n = os.cpu_count() or 1
    cap = os.environ.get("SPINCAVITY_THREADS")
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise ConfigError(f"SPINCAVITY_THREADS: expected an integer, got {cap!r}") from None
    return n


def _complex(pair) -> complex:
    return complex(pair[0], pair[1])


def build_mode(spec) -> GateMode:
    if spec.kind == "ideal":
        return Ideal(spec.delta_phi)
    if spec.kind == "ebs":
        return Ebs(_complex(spec.t0) if spec.t0 else -1.0, _complex(spec.rh) if spec.rh else 1.0)
    if spec.cavity is None:
        return Lossy(_complex(spec.r0), _complex(spec.rh))
    c = spec.cavity
    point = cavity.evaluate_point(c.g_norm, c.ks_over_k, c.gamma_ratio, c.gamma_reference)
    best = point.best(c.branch)
    if best is None:
        raise ConfigError(
            f"params.mode.cavity: no +/-pi/2 phase solution at g_norm={c.g_norm}, ks_over_k={c.ks_over_k}"
        )
    return Lossy.from_pair(cavity.reflection_coefficients(point.params, best.omega_prime))


def _check_analyzer(analyzer: int, mode: GateMode) -> None:
    if (analyzer == 2) != isinstance(mode, Ebs):
        raise ConfigError("params.mode.kind: analyzer 2 requires kind 'ebs'; analyzer 1 requires 'ideal' or 'lossy'")


def _sampled(branches, shots: int, rng: np.random.Generator) -> list:
    return [sample_branch(branches, rng) or _lost_marker(branches) for _ in range(shots)]


def _lost_marker(branches):
    return next(b for b in branches if not b.survived)


def _run_sweep(cfg, workers):
    p = cfg.params
    grid = cavity.sweep_metrics(
        p.g_values(), p.ks_over_k, p.gamma_ratio, p.gamma_reference,
        tuple(p.window) if p.window else None, p.n_scan, workers,
    )
    best = [(pt, pt.best()) for pt in grid.points if pt.has_solution]
    if best:
        pt, br = max(best, key=lambda x: x[1].eta)
        summary = (f"sweep: {len(grid.points)} points, {len(best)} with solutions; "
                   f"best eta={br.eta:.6g} (f_phi={br.f_phi:.6g}) at g_norm={pt.g_norm:.6g}, ks_over_k={pt.ks_over_k:.6g}")
    else:
        summary = f"sweep: {len(grid.points)} points, none with a +/-pi/2 solution"
    return grid.to_csv(), summary


def _run_bsa(cfg, rng):
    p = cfg.params
    mode = build_mode(p.mode)
    _check_analyzer(p.analyzer, mode)
    lines, correct = [], 0.0
    protocol = f"bsa_type{p.analyzer}"
    for name in p.bell:
        variant = BellState(name)
        state = prepare_bell(variant)
        if p.analyzer == 1:
            outs = bsa_type1_branches(state, mode=mode)
        else:
            outs = bsa_type2_branches(state, t0=mode.t0, rh=mode.rh)
        if p.shots:
            outs = _sampled(outs, p.shots, rng)
            weight = 1 / p.shots
            outs = [type(o)(**{**o.__dict__, "probability": weight}) for o in outs]
        correct += sum(o.probability for o in outs if o.survived and o.inferred is variant)
        lines += records.bsa_lines(protocol, mode_name(mode), variant, outs)
    summary = f"{protocol} {mode_name(mode)}: mean correct-inference probability {correct / len(p.bell):.6g}"
    return lines, summary


def _run_teleport(cfg, rng):
    p = cfg.params
    mode = build_mode(p.mode)
    _check_analyzer(p.analyzer, mode)
    dec = cavity.DecoherenceModel(p.t2e, p.delta_t) if p.t2e is not None else None
    alpha, beta = _complex(p.alpha), _complex(p.beta)
    if p.analyzer == 1:
        recs = teleport_type1_branches(alpha, beta, mode, dec)
    else:
        recs = teleport_type2_branches(alpha, beta, mode.t0, mode.rh, dec)
    if p.shots:
        recs = _sampled(recs, p.shots, rng)
        recs = [type(r)(**{**r.__dict__, "probability": 1 / p.shots}) for r in recs]
    alive = [r for r in recs if r.survived]
    surv = sum(r.probability for r in alive)
    mean_f = sum(r.probability * r.fidelity for r in alive) / surv if surv else float("nan")
    summary = f"teleport_type{p.analyzer} {mode_name(mode)}: {len(recs)} records, survival {surv:.6g}, mean fidelity {mean_f:.6g}"
    return records.teleport_lines(recs), summary


def _run_swap(cfg, rng):
    p = cfg.params
    mode = build_mode(p.mode)
    _check_analyzer(p.analyzer, mode)
    recs = swap_type1_branches(mode) if p.analyzer == 1 else swap_type2_branches(mode.t0, mode.rh)
    if p.shots:
        recs = _sampled(recs, p.shots, rng)
        recs = [type(r)(**{**r.__dict__, "probability": 1 / p.shots}) for r in recs]
    alive = [r for r in recs if r.survived]
    belled = sum(r.probability for r in alive if r.bell is not None)
    summary = f"swap_type{p.analyzer} {mode_name(mode)}: {len(recs)} records, Bell-valued probability {belled:.6g}"
    return records.swap_lines(recs), summary


def _run_echo(cfg, rng):
    p = cfg.params
    res = spin_echo_sim(p.t2_star, p.total_time, p.echo, p.n_samples, rng, p.noise_axis)
    return records.echo_lines(res, p.echo), f"echo: coherence {res.coherence:.6g} (stderr {res.stderr:.3g})"


def _run_link(cfg, workers):
    p = cfg.params
    link = LinkModel(p.p_arrival, p.window_attempts, p.attempt_period, p.t2e if p.t2e else float("inf"))
    res = loss_resistance_mc(link, p.n_trials, np.random.SeedSequence(cfg.seed), workers)
    summary = (f"link: memory_rate {res.memory_rate:.6g}, coincidence_rate {res.coincidence_rate:.6g}, "
               f"ratio {res.ratio:.6g} (closed form {link.expected_ratio():.6g}), mean F' {res.mean_f_prime:.6g}")
    return records.link_lines(res), summary


def run(cfg, workers: int = 1) -> tuple[str, str]:
    """Execute a validated config; returns (artifact text, one-line summary)."""
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    if cfg.command == "sweep":
        return _run_sweep(cfg, workers)
    if cfg.command == "link":
        lines, summary = _run_link(cfg, workers)
    else:
        handler = {"bsa": _run_bsa, "teleport": _run_teleport, "swap": _run_swap, "echo": _run_echo}[cfg.command]
        lines, summary = handler(cfg, rng)
    return "".join(line + "\n" for line in lines), summary


def default_output(command: str) -> str:
    return f"{command}.csv" if command == "sweep" else f"{command}.jsonl"


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="spincavity", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="TOML or JSON config file (selected by extension)")
    ap.add_argument("--seed", type=int, help="overrides the config seed")
    ap.add_argument("--out", help="artifact path (overrides the config output)")
    args = ap.parse_args(argv)

    try:
        if args.config:
            cfg = load_config(args.config)
            if cfg.command != args.command:
                raise ConfigError(f"command: config says {cfg.command!r} but {args.command!r} was requested")
        else:
            cfg = config_from_dict({"command": args.command})
        if args.seed is not None:
            cfg = config_from_dict({**cfg.model_dump(), "seed": args.seed})
        workers = worker_count()
        artifact, summary = run(cfg, workers)
    except ConfigError as err:
        print(f"spincavity: invalid config: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"spincavity: cannot read config: {err}", file=sys.stderr)
        return 2

    out = Path(args.out or cfg.output or default_output(cfg.command))
    try:
        out.write_text(artifact, encoding="utf-8")
    except OSError as err:
        print(f"spincavity: cannot write {out}: {err}", file=sys.stderr)
        return 3
    print(summary)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
