"""Named experiment batteries and the configuration record that selects them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from trotterlab import landau
from trotterlab.errors import ConfigError, DegenerateFitError, PreconditionError
from trotterlab.evolution import potentials
from trotterlab.evolution.bridge import discretized_bridge
from trotterlab.evolution.cantor import CantorSpec, cantor_open_measure, cantor_window
from trotterlab.evolution.riemann import corner_error, operator_error_sandwich, sup_riemann_error
from trotterlab.evolution.witness import slow_witness
from trotterlab.semigroup_checks import section1_battery, spd_battery
from trotterlab.trotter_engine import (
    DYADIC_NS,
    Ordering,
    accretive_pair_battery,
    envelope_check,
    fit_rate,
    measure_constants,
    trotter_error_curve,
)

MAX_SEED = 2**64 - 1
MONOTONE_JITTER = 1e-13
MIN_GAMMA = 0.85
HOLDER_SLACK = 1e-9


@dataclass
class ExperimentOutput:
    rows: list[dict]
    checks: list[tuple[str, bool]]
    constants: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks)


@dataclass(frozen=True)
class Experiment:
    name: str
    defaults: dict
    run: Callable[[dict], ExperimentOutput]
    summary: str


def _section1(p: dict) -> ExperimentOutput:
    rng = np.random.default_rng(p["seed"])
    reports = section1_battery(
        spd_battery(tuple(p["dims"]), rng),
        alphas=tuple(p["alphas"]),
        mu_grid=tuple(p["mu_grid"]),
        t_grid=tuple(p["t_values"]),
    )
    rows = [r.as_row() for r in reports]
    for row, r in zip(rows, reports):
        row["margin"] = r.margin
    checks = [(f"{r.lemma_id.value}#{i}", r.satisfied and r.margin >= 0) for i, r in enumerate(reports)]
    return ExperimentOutput(rows, checks, {"C_A": 1.0})


def _pair_curves(p: dict):
    pairs = accretive_pair_battery(seed=p["seed"], count=p["count"])
    for idx, (a, b) in enumerate(pairs):
        k = measure_constants(a, b, p["alpha"])
        for t in p["t_values"]:
            for ordering in Ordering:
                yield idx, a, k, trotter_error_curve(a, b, t, p["n_list"], ordering)


def _monotone(errors: np.ndarray) -> bool:
    return bool(np.all(np.diff(errors) <= MONOTONE_JITTER))


def _trotter_rates(p: dict) -> ExperimentOutput:
    rows, checks, constants = [], [], {}
    for idx, a, k, curve in _pair_curves(p):
        constants[f"pair{idx}"] = k.as_dict()
        try:
            fit = fit_rate(curve)
            gamma, r2 = fit.gamma, fit.r_squared
        except DegenerateFitError:
            gamma, r2 = math.inf, 1.0
        mono = _monotone(curve.errors)
        rows.append(
            {
                "pair": idx,
                "dim": a.dim,
                "t": curve.t,
                "ordering": curve.ordering.value,
                "gamma": gamma,
                "r_squared": r2,
                "monotone": mono,
                "error_first": float(curve.errors[0]),
                "error_last": float(curve.errors[-1]),
            }
        )
        tag = f"pair{idx}/t={curve.t}/{curve.ordering.value}"
        checks.append((tag + "/monotone", mono))
        checks.append((tag + "/gamma", gamma >= MIN_GAMMA))
    return ExperimentOutput(rows, checks, constants)


def _envelope_audit(p: dict) -> ExperimentOutput:
    rows, checks, constants = [], [], {}
    for idx, a, k, curve in _pair_curves(p):
        constants[f"pair{idx}"] = k.as_dict()
        result = envelope_check(curve, k)
        for rep in result.reports:
            rows.append(
                {
                    "pair": idx,
                    "t": curve.t,
                    "ordering": curve.ordering.value,
                    "n": rep.parameters["n"],
                    "error": rep.lhs,
                    "envelope": rep.rhs,
                    "margin": rep.margin,
                    "eta": result.eta,
                }
            )
        checks.append((f"pair{idx}/t={curve.t}/{curve.ordering.value}", result.satisfied))
    return ExperimentOutput(rows, checks, constants)


def _evolution_rates(p: dict) -> ExperimentOutput:
    rows, checks = [], []
    gd = p["grid_density"]
    lin = potentials.linear()
    for n in p["n_list"]:
        lower, upper = operator_error_sandwich(lin, n, gd)
        rows.append(
            {"potential": "linear", "beta": 1.0, "n": n, "sup_error": upper, "bound": 1.0 / (2 * n), "lower": lower}
        )
        checks.append((f"linear/n={n}", abs(upper - 1.0 / (2 * n)) <= 1e-12))
    for variant in p["variants"]:
        for beta in p["betas"]:
            q = potentials.make_holder_potential(beta, variant)
            lb = q.holder[1]
            for n in p["n_list"]:
                lower, upper = operator_error_sandwich(q, n, gd)
                bound = lb * n**-beta
                rows.append(
                    {"potential": variant, "beta": beta, "n": n, "sup_error": upper, "bound": bound, "lower": lower}
                )
                checks.append((f"{variant}/beta={beta}/n={n}", upper <= bound * (1 + HOLDER_SLACK)))
    return ExperimentOutput(rows, checks)


def _cantor_demo(p: dict) -> ExperimentOutput:
    spec = CantorSpec(p["level_cap"])
    q = potentials.cantor(spec)
    rows, checks = [], []
    for m in p["m_levels"]:
        n = 2**m
        eps, _ = cantor_window(m)
        sup = sup_riemann_error(q, n, p["grid_density"])
        floor = 0.5 - 2 * eps
        rows.append({"m": m, "n": n, "sup_error": sup, "floor": floor, "lower_edge": math.exp(-1.0) * sup})
        checks.append((f"m={m}", sup >= floor))
    meas = cantor_open_measure(spec)
    closed = 1.0 - meas.open_measure
    checks.append(("closed_measure", closed >= 0.5 - meas.uncertainty))
    return ExperimentOutput(
        rows, checks, {"open_measure": meas.open_measure, "closed_measure": closed, "tail_uncertainty": meas.uncertainty}
    )


def _slow_witness_demo(p: dict) -> ExperimentOutput:
    levels = [tuple(x) for x in p["levels"]]
    q = slow_witness(levels)
    rows, checks = [], []
    for n, delta in levels:
        r = corner_error(q, n)
        rows.append({"n": n, "delta": delta, "riemann_error": r})
        checks.append((f"n={n}", r >= delta))
    verdicts = {}
    for ref in p["references"]:
        curve = landau.curve_from_values([n for n, _ in levels], [row["riemann_error"] for row in rows])
        try:
            verdicts[ref] = landau.classify_rate(curve, ref)
        except PreconditionError as exc:
            verdicts[ref] = f"not classified: {exc}"
    return ExperimentOutput(rows, checks, {"descriptor": q.descriptor(), "sup_norm": q.sup_norm, "verdicts": verdicts})


def _bridge_check(p: dict) -> ExperimentOutput:
    q = potentials.from_descriptor(p["potential"])
    m = p["m"]
    rows, checks = [], []
    for n in p["n_list"]:
        res = discretized_bridge(q, m, p["tau"], n)
        rows.append(
            {
                "case": "potential",
                "n": n,
                "matrix_error": res.matrix_error,
                "scalar_error": res.scalar_error,
                "gap": res.gap,
                "tolerance": 2.0 / m,
            }
        )
        checks.append((f"n={n}", res.gap <= 2.0 / m))
    zero = discretized_bridge(potentials.constant(0.0), m, p["tau"], p["n_list"][0])
    rows.append(
        {
            "case": "commuting",
            "n": p["n_list"][0],
            "matrix_error": zero.matrix_error,
            "scalar_error": zero.scalar_error,
            "gap": zero.gap,
            "tolerance": 0.0,
        }
    )
    checks.append(("commuting", zero.matrix_error == 0.0 == zero.scalar_error))
    return ExperimentOutput(rows, checks)


_PAIR_DEFAULTS = {"seed": 0, "count": 10, "alpha": 0.5, "t_values": [0.5, 1.0, 2.0], "n_list": list(DYADIC_NS)}

EXPERIMENTS: dict[str, Experiment] = {
    e.name: e
    for e in (
        Experiment(
            "section1_battery",
            {
                "seed": 0,
                "dims": [1, 2, 8, 16],
                "alphas": [0.25, 0.5, 0.75],
                "mu_grid": [0.01, 0.1, 1.0, 10.0, 100.0],
                "t_values": [0.01, 0.1, 1.0, 5.0, 10.0],
            },
            _section1,
            "preliminary semigroup inequalities on SPD generators",
        ),
        Experiment("trotter_rates", dict(_PAIR_DEFAULTS), _trotter_rates, "error curves and fitted rates"),
        Experiment("envelope_audit", dict(_PAIR_DEFAULTS), _envelope_audit, "error curves against the envelopes"),
        Experiment(
            "evolution_rates",
            {
                "seed": 0,
                "betas": [0.3, 0.5, 0.7, 1.0],
                "variants": ["kink", "weierstrass"],
                "n_list": list(DYADIC_NS),
                "grid_density": 64,
            },
            _evolution_rates,
            "Riemann-error rates for linear and Hoelder potentials",
        ),
        Experiment(
            "cantor_demo",
            {"seed": 0, "m_levels": [2, 3, 4, 5, 6], "grid_density": 64, "level_cap": 26},
            _cantor_demo,
            "nonconvergence for the Cantor-set indicator",
        ),
        Experiment(
            "slow_witness_demo",
            {
                "seed": 0,
                "levels": [[8, 0.2], [64, 0.05], [512, 0.0125]],
                "references": ["n^-0.25", "n^-0.5", "n^-1"],
            },
            _slow_witness_demo,
            "validated slow-convergence potential",
        ),
        Experiment(
            "bridge_check",
            {"seed": 0, "m": 256, "tau": 0.5, "n_list": [4, 8, 16], "potential": {"kind": "linear", "slope": 1.0}},
            _bridge_check,
            "matrix versus scalar Trotter error on a grid",
        ),
    )
}


def _coerce(name: str, key: str, value, default):
    if isinstance(default, bool):
        ok = isinstance(value, bool)
    elif isinstance(default, int):
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif isinstance(default, float):
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        value = float(value) if ok else value
    elif isinstance(default, list):
        ok = isinstance(value, list)
    elif isinstance(default, dict):
        ok = isinstance(value, dict)
    else:
        ok = True
    if not ok:
        raise ConfigError(f"parameter has the wrong type for {name}", key)
    return value


def resolve_parameters(name: str, params: dict | None) -> dict:
    """Defaults overlaid with ``params``; unknown keys are rejected."""
    if name not in EXPERIMENTS:
        raise ConfigError("unknown experiment", name)
    exp = EXPERIMENTS[name]
    out = {k: (list(v) if isinstance(v, list) else dict(v) if isinstance(v, dict) else v) for k, v in exp.defaults.items()}
    for key, value in (params or {}).items():
        if key not in exp.defaults:
            raise ConfigError(f"unknown parameter for {name}", key)
        out[key] = _coerce(name, key, value, exp.defaults[key])
    if not 0 <= out["seed"] <= MAX_SEED:
        raise ConfigError("seed must be an unsigned 64-bit integer", "seed")
    return out


def run_experiment(name: str, params: dict) -> ExperimentOutput:
    return EXPERIMENTS[name].run(params)
