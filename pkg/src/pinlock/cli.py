"""Command-line front end.

    pinlock <analyze|design|game|simulate> --config FILE [--out DIR]
            [--set key=value ...]

Configs are JSON (schema tag "pinlock/v1"). ``--config`` also accepts a
builtin job name (currently ``paper-game``); topology and dynamics fields
inside a config accept builtin names (``paper-fig2``, ``chen``). ``--set``
overrides apply after loading, with dotted paths into nested objects and
JSON-parsed values.

Exit codes: 0 success (analyze: synchronized), 2 negative verdicts
(not synchronized / infeasible / degenerate or unbounded game), 1 errors.
Reports embed the fully resolved config so any run can be reproduced from
its own output.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import fixtures
from .design import DesignProblem, solve_cardinality, solve_free, solve_identical_bip
from .errors import PinlockError
from .game import GameSpec, solve_fixed_attacker_budget, solve_fixed_defender_budget, \
    solve_stackelberg
from .network import Topology, coupling_matrix, topology_from_json
from .numerics import INFEASIBLE, OPTIMAL, UNBOUNDED, symmetric_eigen
from .sim import SimConfig, convergence_rate, default_initial_states, simulate, \
    DEFAULT_X0_SEED
from .sync import NodeDynamics, PinningScheme, check_sync_linear, control_matrix_B
from .tolerances import DEFAULT, from_env

SCHEMA = "pinlock/v1"


def _load_config(path_or_name: str) -> dict:
    if path_or_name in fixtures.JOB_NAMES:
        return fixtures.builtin_job(path_or_name)
    p = Path(path_or_name)
    with p.open() as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise PinlockError("config must be a JSON object")
    schema = data.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise PinlockError(f"unsupported schema {schema!r}; expected {SCHEMA!r}")
    return data


def _apply_overrides(cfg: dict, pairs: list[str]) -> dict:
    for pair in pairs:
        if "=" not in pair:
            raise PinlockError(f"--set expects key=value, got {pair!r}")
        key, raw = pair.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        target = cfg
        parts = key.split(".")
        for part in parts[:-1]:
            target = target.setdefault(part, {})
            if not isinstance(target, dict):
                raise PinlockError(f"--set path {key!r} crosses a non-object")
        target[parts[-1]] = value
    return cfg


def _resolve_topology(value) -> Topology:
    if isinstance(value, str):
        return fixtures.builtin_topology(value)
    return topology_from_json(value)


def _resolve_dynamics(value) -> NodeDynamics:
    if isinstance(value, str):
        return fixtures.builtin_dynamics(value)
    return NodeDynamics(
        jf=np.array(value["jf"], dtype=float),
        a_g=float(value.get("a_g", 1.0)),
        b_g=float(value.get("b_g", 0.0)),
        c=float(value.get("c", 1.0)),
        jg=np.array(value["jg"], dtype=float) if value.get("jg") is not None else None,
        lambda_convention=value.get("lambda_convention", "max-real"),
    )


def _write_json(out_dir: Path, name: str, payload: dict) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    with path.open("w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    return path


def cmd_analyze(cfg: dict, out_dir: Path, tol) -> int:
    topo = _resolve_topology(cfg["topology"])
    dyn = _resolve_dynamics(cfg["dynamics"])
    scheme = PinningScheme(np.array(cfg["beta"], dtype=float))
    a = coupling_matrix(topo)
    report = check_sync_linear(a, scheme, dyn, tol)
    spectrum = symmetric_eigen(control_matrix_B(a, scheme), tol)
    payload = {
        "schema": SCHEMA,
        "kind": "analyze",
        "config": cfg,
        "mu": spectrum.eigenvalues.tolist(),
        "mu_max": report.mu_max,
        "threshold": report.threshold,
        "margin": report.margin,
        "boundary": report.boundary,
        "synced": report.synced,
    }
    path = _write_json(out_dir, "analysis.json", payload)
    print(f"synced={report.synced} margin={report.margin:.6g} -> {path}")
    return 0 if report.synced else 2


def cmd_design(cfg: dict, out_dir: Path, tol) -> int:
    topo = _resolve_topology(cfg["topology"])
    dyn = _resolve_dynamics(cfg["dynamics"])
    a = coupling_matrix(topo)
    mode = cfg.get("mode", "free")
    problem = DesignProblem(
        a=a,
        v=np.array(cfg["v"], dtype=float),
        dyn=dyn,
        selectable=frozenset(cfg["selectable"]) if cfg.get("selectable") else None,
        gain_ratio=float(cfg.get("gain_ratio", 1.0)),
        n_total=cfg.get("n_total"),
    )
    solver = {
        "free": solve_free,
        "identical": solve_identical_bip,
        "cardinality": solve_cardinality,
    }.get(mode)
    if solver is None:
        raise PinlockError(f"unknown design mode {mode!r}")
    sol = solver(problem, tol)
    payload = {
        "schema": SCHEMA,
        "kind": "design",
        "config": cfg,
        "status": sol.status,
        "threshold": sol.threshold,
        "beta": None if sol.beta is None else sol.beta.tolist(),
        "selected": None if sol.selected is None else sol.selected.tolist(),
        "gains": None if sol.gains is None else sol.gains.tolist(),
        "total_cost": sol.total_cost,
        "mu_max": sol.mu_max,
        "cuts": sol.cuts,
        "nodes": sol.nodes,
        "message": sol.message,
    }
    path = _write_json(out_dir, "design.json", payload)
    if sol.status == INFEASIBLE:
        print(f"infeasible: {sol.message} -> {path}")
        return 2
    print(f"status={sol.status} cost={sol.total_cost:.6g} "
          f"pinned={[i + 1 for i, d in enumerate(sol.selected) if d]} -> {path}")
    return 0


def cmd_game(cfg: dict, out_dir: Path, tol) -> int:
    topo = _resolve_topology(cfg["topology"])
    dyn = _resolve_dynamics(cfg["dynamics"])
    a = coupling_matrix(topo)
    spec = GameSpec(
        a=a,
        beta_pin=np.array(cfg["beta_pin"], dtype=float),
        kappa=np.array(cfg["kappa"], dtype=float),
        dyn=dyn,
        eta=float(cfg.get("eta", 0.0)),
        gain_ratio=float(cfg.get("gain_ratio", 1.0)),
        pi_cap=np.array(cfg["pi_cap"], dtype=float) if cfg.get("pi_cap") is not None else None,
    )
    mode = cfg.get("mode", "stackelberg")
    if mode == "stackelberg":
        outcome = solve_stackelberg(spec, tol)
    elif mode == "fixed-defender":
        outcome = solve_fixed_defender_budget(spec, float(cfg["omega"]), tol)
    elif mode == "fixed-attacker":
        allocation = solve_fixed_attacker_budget(spec, float(cfg["omega"]), tol)
        payload = {
            "schema": SCHEMA, "kind": "game", "config": cfg, "mode": mode,
            "status": OPTIMAL,
            "pi_d": allocation.pi_d.tolist(), "total_budget": allocation.total,
        }
        path = _write_json(out_dir, "game.json", payload)
        print(f"total defense budget {allocation.total:.6g} -> {path}")
        return 0
    else:
        raise PinlockError(f"unknown game mode {mode!r}")

    attack_list = None
    if outcome.t0 <= 4096:
        sigma = spec.kappa * outcome.pi_d_star.pi_d
        attack_list = [
            {"nodes": list(atk.nodes()),
             "beta_attack": atk.beta_attack.tolist(),
             "cost": float(sigma @ atk.beta_attack)}
            for atk in outcome.attacks
        ]
    payload = {
        "schema": SCHEMA, "kind": "game", "config": cfg, "mode": mode,
        "status": outcome.status,
        "t0": outcome.t0,
        "pi_d_star": outcome.pi_d_star.pi_d.tolist(),
        "ray_normalized": outcome.ray_normalized,
        "beta_attack_star": outcome.beta_attack_star.beta_attack.tolist(),
        "attack_nodes": list(outcome.beta_attack_star.nodes()),
        "attack_cost": outcome.attack_cost,
        "defender_payoff": outcome.defender_payoff,
        "game_value": outcome.game_value,
        "unused_kappa_nodes": list(outcome.unused_kappa_nodes),
        "successful_attacks": attack_list,
    }
    path = _write_json(out_dir, "game.json", payload)
    print(f"status={outcome.status} attack={list(outcome.beta_attack_star.nodes())} "
          f"cost={outcome.attack_cost:.6g} -> {path}")
    return 0 if outcome.status == OPTIMAL else 2


def cmd_simulate(cfg: dict, out_dir: Path, tol) -> int:
    topo = _resolve_topology(cfg["topology"])
    dyn_cfg = cfg["dynamics"]
    dyn = _resolve_dynamics(dyn_cfg)
    vf = cfg.get("vector_field", "chen")
    if vf == "linear":
        vf = dyn.jf
    node_dim = int(cfg.get("node_dim", 3 if vf == "chen" else dyn.node_dim))
    x_bar = np.array(cfg.get("x_bar", [0.0] * node_dim), dtype=float)
    seed = int(cfg.get("seed", DEFAULT_X0_SEED))
    if cfg.get("x0") is not None:
        x0 = np.array(cfg["x0"], dtype=float)
    else:
        x0 = default_initial_states(topo.n, node_dim, seed=seed,
                                    scale=float(cfg.get("x0_scale", 1.0)), x_bar=x_bar)
    sim_cfg = SimConfig(
        topology=topo,
        node_dim=node_dim,
        vector_field=vf,
        c=dyn.c,
        a_g=dyn.a_g,
        b_g=dyn.b_g,
        beta=np.array(cfg["beta"], dtype=float),
        attack=np.array(cfg["attack"], dtype=float) if cfg.get("attack") is not None else None,
        x_bar=x_bar,
        x0=x0,
        dt=float(cfg.get("dt", 1e-3)),
        t_end=float(cfg.get("t_end", 10.0)),
    )
    traj = simulate(sim_cfg, tol)
    rate = convergence_rate(traj)

    out_dir.mkdir(parents=True, exist_ok=True)
    traj_path = out_dir / "trajectory.csv"
    with traj_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "node"] + [f"x{d + 1}" for d in range(node_dim)])
        for k, t in enumerate(traj.times):
            for i in range(topo.n):
                writer.writerow([f"{t:.9g}", i + 1] +
                                [f"{v:.9g}" for v in traj.states[k, i]])
    err_path = out_dir / "sync_error.csv"
    with err_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "sync_error"])
        for t, e in zip(traj.times, traj.sync_error):
            writer.writerow([f"{t:.9g}", f"{e:.9g}"])
    payload = {
        "schema": SCHEMA, "kind": "simulate", "config": cfg,
        "seed": seed, "dt": sim_cfg.dt, "t_end": sim_cfg.t_end,
        "diverged": traj.diverged,
        "final_sync_error": float(traj.sync_error[-1]),
        "convergence_rate": None if rate.exact_sync else rate.rate,
        "exact_sync": rate.exact_sync,
        "trajectory_csv": str(traj_path),
        "sync_error_csv": str(err_path),
    }
    path = _write_json(out_dir, "simulation.json", payload)
    print(f"diverged={traj.diverged} final_error={traj.sync_error[-1]:.6g} -> {path}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="pinlock",
        description="Pinning-control design, synchronization analysis, "
                    "security games, and network simulation.",
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in ("analyze", "design", "game", "simulate"):
        p = sub.add_parser(kind)
        p.add_argument("--config", required=True,
                       help="JSON config file or a builtin job name")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="override a config entry")
    args = parser.parse_args(argv)

    try:
        tol = from_env(DEFAULT)
        cfg = _load_config(args.config)
        cfg = _apply_overrides(cfg, args.overrides)
        out_dir = Path(args.out)
        handler = {
            "analyze": cmd_analyze,
            "design": cmd_design,
            "game": cmd_game,
            "simulate": cmd_simulate,
        }[args.kind]
        return handler(cfg, out_dir, tol)
    except (PinlockError, OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
