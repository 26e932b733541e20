"""Command-line front end.

One JSON config document per invocation (positional path or
``--config``), optionally seeded from a named preset; scalar flags
override config fields.  All output is deterministic: JSON with sorted
keys, CSV floats at 17 significant digits.  Exit codes: 0 success,
2 configuration/validation problem, 3 failed numerical check.
"""

import argparse
import copy
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import dynamics, multiplets, observables, spectra, symmetry, yangian
from .errors import ConfigError, NumericalCheckError
from .operators import SpinRegister

PRESETS = {
    "v6-triangle": {
        "spectrum": {"family": "triangle", "J12": 65.0, "J13": 7.0},
        "moments": {"sites": 3, "J12": 65.0, "J13": 7.0, "m": -0.5},
    },
    "v8-ground": {
        "spectrum": {"family": "parallelogram", "a12": 1.0, "a13": -3.0},
        "moments": {"sites": 4, "a12": 1.0, "a13": -3.0, "m": -1.0},
    },
    "fig4-loop": {
        "simulate": {
            "field": {"kind": "sinusoid", "amplitude": 10.0,
                      "angular_rate": 1.0, "t_start": 0.0,
                      "t_end": 2.0 * math.pi},
            "init": "equilibrium",
            "n_steps": 100000,
            "lzs_mode": "off",
        },
    },
    "fig5-lzs": {
        "simulate": {
            "field": {"kind": "sinusoid", "amplitude": 10.0,
                      "angular_rate": 1.0, "t_start": 0.0,
                      "t_end": math.pi},
            "delta_gap": 0.1,
            "init": "equilibrium",
            "n_steps": 100000,
            "lzs_mode": "adiabatic",
        },
    },
}

_FIELD_KEYS = {"kind", "amplitude", "angular_rate", "t_start", "t_end"}
_SCHEMAS = {
    "q-spectrum": {"sites", "weights"},
    "check-yangian": {"sites", "weights"},
    "commutant": {"sites", "weights"},
    "spectrum": {"family", "J12", "J13", "a12", "a13"},
    "phase-map": {"a12_range", "a13_range", "n_grid"},
    "moments": {"sites", "J12", "J13", "a12", "a13", "m", "g", "label"},
    "levels-report": {"b_min", "b_max", "n_grid", "delta_gap", "gamma"},
    "simulate": {"A", "inv_temp", "gamma", "delta_gap", "field", "init",
                 "n_steps", "lzs_mode", "mode"},
}

# Canonical invariant label of each closed-form level: collective spin,
# invariant eigenvalue, and occurrence index inside its (S, m) group
# (the two q = -1/2 triplets share the eigenvalue).
_LEVEL_KEYS = {
    3: {"alpha": (0.5, -0.25, 0), "beta": (0.5, -2.25, 0),
        "quartet": (1.5, -1.0, 0)},
    4: {"quintet": (2.0, -2.5, 0), "triplet1": (1.0, -0.5, 0),
        "triplet2": (1.0, -5.5, 0), "triplet3": (1.0, -0.5, 1),
        "singlet_plus": (0.0, -1.0, 0), "singlet_minus": (0.0, -3.0, 0)},
}


def _fmt(value) -> str:
    return f"{float(value):.17g}"


def _validate_keys(cfg: dict, command: str):
    unknown = set(cfg) - _SCHEMAS[command]
    if unknown:
        raise ConfigError(
            f"unknown config keys for {command}: {sorted(unknown)}")
    if "field" in cfg:
        if not isinstance(cfg["field"], dict):
            raise ConfigError("'field' must be an object")
        bad = set(cfg["field"]) - _FIELD_KEYS
        if bad:
            raise ConfigError(f"unknown field keys: {sorted(bad)}")


def _require(cfg: dict, command: str, *names):
    missing = [name for name in names if name not in cfg]
    if missing:
        raise ConfigError(f"{command} config is missing {missing}")
    return [cfg[name] for name in names]


def _register_and_weights(cfg):
    sites = int(cfg.get("sites", 3))
    register = SpinRegister(sites)
    weights = cfg.get("weights", [0.0] * sites)
    if np.asarray(weights, dtype=float).shape != (sites,):
        raise ConfigError(f"weights must be a list of {sites} numbers")
    return register, [float(w) for w in weights]


def _cmd_q_spectrum(cfg) -> str:
    register, weights = _register_and_weights(cfg)
    spectrum = yangian.q_spectrum(register, weights)
    states = yangian.q_joint_labels(register, weights)
    doc = {
        "sites": register.n_sites,
        "weights": weights,
        "eigenvalues": [{"value": value, "multiplicity": count}
                        for value, count in spectrum.multiplicities()],
        "states": [{"S": st.S, "m": st.m, "q": st.q,
                    "degenerate": st.degenerate} for st in states],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _cmd_check_yangian(cfg) -> str:
    register, weights = _register_and_weights(cfg)
    report = yangian.check_yangian_axioms(register, weights)
    doc = {"sites": register.n_sites, "weights": weights}
    doc.update(dataclasses.asdict(report))
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _cmd_commutant(cfg) -> str:
    register, weights = _register_and_weights(cfg)
    family = symmetry.commutant_family(register, yangian.build_q(register, weights))
    pairs = symmetry.pair_order(register.n_sites)
    doc = {
        "sites": register.n_sites,
        "weights": weights,
        "dimension": family.dimension,
        "pair_order": [f"{i}-{j}" for i, j in pairs],
        "basis": [{f"{i}-{j}": member.a[(i, j)] for i, j in pairs}
                  for member in family.basis],
        "singular_values": [float(s) for s in family.singular_values],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _ground_labels(levelset) -> list:
    energies = [lev.energy for lev in levelset.levels]
    tol = spectra.DEFAULT_TIE_RTOL * max(1.0, max(abs(e) for e in energies))
    ground = min(energies)
    return [lev.label for lev in levelset.levels if lev.energy <= ground + tol]


def _levelset_for(cfg, command: str):
    family = cfg.get("family", "parallelogram")
    if family == "triangle":
        J12, J13 = _require(cfg, command, "J12", "J13")
        levelset = spectra.triangle_levels(float(J12), float(J13))
        params = {"J12": float(J12), "J13": float(J13)}
    elif family == "parallelogram":
        a12, a13 = _require(cfg, command, "a12", "a13")
        levelset = spectra.parallelogram_levels(float(a12), float(a13))
        params = {"a12": float(a12), "a13": float(a13)}
    else:
        raise ConfigError(f"unknown family {family!r}")
    return family, params, levelset


def _cmd_spectrum(cfg) -> str:
    family, params, levelset = _levelset_for(cfg, "spectrum")
    doc = {
        "family": family,
        "params": params,
        "levels": [dataclasses.asdict(lev) for lev in levelset.levels],
        "weighted_sum": levelset.weighted_sum(),
        "ground_labels": _ground_labels(levelset),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _cmd_phase_map(cfg) -> str:
    a12_range, a13_range, n_grid = _require(
        cfg, "phase-map", "a12_range", "a13_range", "n_grid")
    points = spectra.phase_map(a12_range, a13_range, int(n_grid))
    lines = ["a12,a13,ground_labels,ground_S,ground_energy"]
    for pt in points:
        spin = pt.ground_S if isinstance(pt.ground_S, str) else _fmt(pt.ground_S)
        lines.append(",".join([
            _fmt(pt.a12), _fmt(pt.a13), ";".join(pt.ground_labels),
            spin, _fmt(pt.ground_energy),
        ]))
    return "\n".join(lines) + "\n"


def _select_invariant_state(register, label, m, level):
    spin, q_target, occurrence = _LEVEL_KEYS[register.n_sites][label]
    matches = [st for st in multiplets.invariant_eigenstates(register)
               if st.S == spin and st.m == m and abs(st.q - q_target) < 1e-9]
    if occurrence >= len(matches):
        raise ConfigError(
            f"no invariant state with S = {spin}, m = {m} for {label!r}")
    return matches[occurrence]


def _cmd_moments(cfg) -> str:
    sites = int(cfg.get("sites", 4))
    if sites == 3:
        family = "triangle"
    elif sites == 4:
        family = "parallelogram"
    else:
        raise ConfigError("moments needs sites = 3 or 4")
    register = SpinRegister(sites)
    cfg_family = dict(cfg)
    cfg_family["family"] = family
    _, params, levelset = _levelset_for(cfg_family, "moments")
    label = cfg.get("label")
    if label is None:
        winners = _ground_labels(levelset)
        if len(winners) > 1:
            raise ConfigError(
                f"ground level is degenerate ({winners}); pass 'label'")
        label = winners[0]
    if label not in _LEVEL_KEYS[sites]:
        raise ConfigError(f"unknown level label {label!r}")
    level = levelset.by_label()[label]
    m = float(cfg.get("m", -level.S))
    if abs(m) > level.S or (2.0 * m) != round(2.0 * m):
        raise ConfigError(f"m = {m} is not a valid projection for S = {level.S}")
    state = _select_invariant_state(register, label, m, level)
    if family == "triangle":
        ham = spectra.triangle_hamiltonian(register, params["J12"], params["J13"])
    else:
        ham = spectra.parallelogram_hamiltonian(register, params["a12"], params["a13"])
    residual = float(np.linalg.norm(ham @ state.vector - level.energy * state.vector))
    scale = max(1.0, abs(level.energy))
    if residual > 1e-9 * scale:
        raise NumericalCheckError(
            f"state for {label!r} fails its eigen-equation: residual {residual:.3e}")
    moments = observables.local_moments(register, state.vector,
                                        float(cfg.get("g", 2.0)))
    doc = {
        "sites": sites,
        "params": params,
        "label": label,
        "S": level.S,
        "m": m,
        "energy": level.energy,
        "g": moments.g,
        "mu": [float(v) for v in moments.mu],
        "total": moments.total,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _cmd_levels_report(cfg) -> str:
    b_min, b_max, n_grid = _require(cfg, "levels-report", "b_min", "b_max", "n_grid")
    n_grid = int(n_grid)
    if n_grid < 1:
        raise ConfigError("n_grid must be at least 1")
    grid = np.linspace(float(b_min), float(b_max), n_grid)
    report = dynamics.coupled_levels_report(
        grid, float(cfg.get("delta_gap", 0.1)), float(cfg.get("gamma", 1.0)))
    lines = ["B,level,numeric,printed,corrected"]
    for i, b_val in enumerate(report.b_grid):
        for k in range(9):
            lines.append(",".join([
                _fmt(b_val), str(k), _fmt(report.numeric[i, k]),
                _fmt(report.printed[i, k]), _fmt(report.corrected[i, k]),
            ]))
    return "\n".join(lines) + "\n"


def _cmd_simulate(cfg) -> str:
    params = dynamics.RateParams(
        A=float(cfg.get("A", 1.0)),
        inv_temp=float(cfg.get("inv_temp", 1.0)),
        gamma=float(cfg.get("gamma", 1.0)),
        delta_gap=float(cfg.get("delta_gap", 0.1)),
    )
    field_cfg = cfg.get("field", {})
    profile = dynamics.FieldProfile(**{k: (v if k == "kind" else float(v))
                                       for k, v in field_cfg.items()})
    init = cfg.get("init", "equilibrium")
    if isinstance(init, list):
        init = tuple(init)
    trajectory = dynamics.integrate_magnetization(
        params, profile, init=init,
        n_steps=int(cfg.get("n_steps", 2000)),
        lzs_mode=cfg.get("lzs_mode", "off"),
        coeff_mode=cfg.get("mode", "derived"),
    )
    return trajectory.to_csv()


_HANDLERS = {
    "q-spectrum": _cmd_q_spectrum,
    "check-yangian": _cmd_check_yangian,
    "commutant": _cmd_commutant,
    "spectrum": _cmd_spectrum,
    "phase-map": _cmd_phase_map,
    "moments": _cmd_moments,
    "levels-report": _cmd_levels_report,
    "simulate": _cmd_simulate,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spincluster",
        description="Spin-cluster invariants, spectra, and dynamics.")
    sub = parser.add_subparsers(dest="command")
    for name in _HANDLERS:
        p = sub.add_parser(name)
        p.add_argument("config_path", nargs="?", metavar="CONFIG",
                       help="JSON config document")
        p.add_argument("--config", help="JSON config document")
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--preset", help=f"one of {sorted(PRESETS)}")
        if name in ("q-spectrum", "check-yangian", "commutant"):
            p.add_argument("--sites", type=int)
        if name == "simulate":
            p.add_argument("--steps", type=int)
            p.add_argument("--mode", choices=list(dynamics.COEFF_MODES))
    return parser


def _load_config(args) -> dict:
    cfg = {}
    if args.preset:
        if args.preset not in PRESETS:
            raise ConfigError(
                f"unknown preset {args.preset!r}; choose from {sorted(PRESETS)}")
        per_command = PRESETS[args.preset]
        if args.command not in per_command:
            raise ConfigError(
                f"preset {args.preset!r} does not configure {args.command!r}")
        cfg.update(copy.deepcopy(per_command[args.command]))
    paths = [p for p in (args.config_path, args.config) if p]
    if len(paths) > 1:
        raise ConfigError("give the config as a positional path or --config, not both")
    if paths:
        try:
            loaded = json.loads(Path(paths[0]).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {paths[0]}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config document must be a JSON object")
        for key, value in loaded.items():
            if key == "field" and isinstance(cfg.get("field"), dict) \
                    and isinstance(value, dict):
                cfg["field"].update(value)
            else:
                cfg[key] = value
    if getattr(args, "sites", None) is not None:
        cfg["sites"] = args.sites
    if getattr(args, "steps", None) is not None:
        cfg["n_steps"] = args.steps
    if getattr(args, "mode", None) is not None:
        cfg["mode"] = args.mode
    _validate_keys(cfg, args.command)
    return cfg


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        text = _HANDLERS[args.command](_load_config(args))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalCheckError as exc:
        print(f"numerical check failed: {exc}", file=sys.stderr)
        return 3
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
