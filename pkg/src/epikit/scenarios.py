"""Scenario documents: JSON schema validation, presets and object builders."""

from __future__ import annotations

import copy
import json
import math
import os
from dataclasses import dataclass
from importlib import resources
from typing import Any

import jsonschema

from .errors import ScenarioError
from .models import (CompartmentState, ConstantQuarantine, ControlSchedule, LogisticQuarantine,
                     PiecewiseLinearQuarantine, QuarantineParams, SeirParams)
from .spatial import (DensityFields, Grid1D, SpatialParams, gaussian_seed_fields,
                      homogeneous_fields, make_grid)

COMPARTMENT_MODELS = ("seir", "seir_linear", "sir", "sir_quarantine")


def scenario_schema() -> dict:
    return json.loads(resources.files("epikit").joinpath("schemas/scenario.schema.json").read_text())


def validate(doc: dict) -> dict:
    try:
        jsonschema.validate(doc, scenario_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ScenarioError(f"{where}: {exc.message}") from None
    return doc


def load(path: str | os.PathLike) -> dict:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"not valid JSON: {exc}") from None
    return validate(doc)


def _fig5(name: str, control: dict | None) -> dict:
    doc = {
        "model": "seir", "name": name,
        "params": {"beta0": 0.5, "sigma": 0.5, "gamma": 0.25, "f": 0.10, "n": 1e4},
        "init": {"s": 1e4 - 10, "e": 0, "i": 10, "r": 0, "d": 0, "c": 10},
        "t_end": 150, "dt": 0.05,
    }
    if control:
        doc["control"] = control
    return doc


_CONTROL = {"t0": 28, "alpha": 0.125}
_REMOVED = {"t0": 28, "alpha": 0.125, "removal_time": 60}

PRESETS: dict[str, dict[str, Any]] = {
    "fig3": {
        "model": "seir_linear", "name": "fig3",
        "params": {"beta0": 0.5, "sigma": 1 / 24, "gamma": 1 / 14, "f": 0.25, "n": 1000},
        "init": {"s": 1000, "e": 0, "i": 10, "r": 0, "d": 0, "c": 10},
        "t_end": 100, "dt": 0.05,
    },
    "fig4": {
        "model": "seir", "name": "fig4",
        "params": {"beta0": 0.5, "sigma": 1 / 24, "gamma": 1 / 14, "f": 0.25, "n": 1e4},
        "init": {"s": 1e4 - 10, "e": 0, "i": 10, "r": 0, "d": 0, "c": 10},
        "t_end": 600, "dt": 0.05,
    },
    # panels come in pairs: populations, then new cases/deaths of the same run
    "fig5a": _fig5("fig5a", None),
    "fig5b": _fig5("fig5b", None),
    "fig5c": _fig5("fig5c", _CONTROL),
    "fig5d": _fig5("fig5d", _CONTROL),
    "fig5e": _fig5("fig5e", _REMOVED),
    "fig5f": _fig5("fig5f", _REMOVED),
    "ebola": {
        "model": "seir", "name": "ebola",
        "params": {"beta0": 0.266, "sigma": 0.072, "gamma": 0.0533, "f": 0.396, "n": 1e6 + 1},
        "control": {"t0": 1, "alpha": 0.00648},
        "init": {"s": 1e6, "e": 0, "i": 1, "r": 0, "d": 0, "c": 1},
        "t_end": 700, "dt": 0.05,
    },
    "fig8a": {
        "model": "spatial_sir", "name": "fig8a",
        "params": {"lam": 0.5, "mu": 0.25, "nu": 0, "f": 0, "g": 0.1},
        "grid": {"length": 1, "n": 64},
        "init": {"kind": "homogeneous", "phi_s": 0.999, "phi_i": 0.001},
        "t_end": 400, "dt": 0.05,
    },
    "fig8b": {
        "model": "spatial_sir", "name": "fig8b",
        "params": {"lam": 0.5, "mu": 0.25, "nu": 0.01, "f": 0.01, "g": 0.1},
        "grid": {"length": 1, "n": 64},
        "init": {"kind": "homogeneous", "phi_s": 0.999, "phi_i": 0.001},
        "t_end": 400, "dt": 0.05,
    },
    "fig9": {
        "model": "spatial_sir", "name": "fig9",
        "params": {"lam": 0.5, "mu": 0.25, "nu": 0.01, "f": 0.01, "g": 0.1, "d_s": 10, "d_i": 2},
        "grid": {"length": 100, "n": 512, "origin": -50},
        "init": {"kind": "gaussian", "s_total": 95, "i_total": 5, "center": 0, "width": 2},
        "t_end": 35, "dt": 0.01, "snapshot_every": 0.5,
    },
    # large per-cell occupancy keeps the Langevin noise small next to the mean field
    "langevin": {
        "model": "spatial_sir", "name": "langevin",
        "params": {"lam": 5e-7, "mu": 0.25, "d_s": 0.5, "d_i": 0.5},
        "grid": {"length": 64, "n": 64},
        "init": {"kind": "homogeneous", "phi_s": 1e6, "phi_i": 1e4},
        "t_end": 40, "dt": 0.01,
    },
    "fig10b": {
        "model": "stability", "name": "fig10b",
        "params": {"lam": 1.0, "mu": 1.1, "nu": 1.0, "f": 1.0, "d_s": 10, "d_i": 1},
        "branch": "red", "k_max": 0.2, "k_steps": 201, "diffusion_ratio": 0.1,
    },
    "gillespie": {
        "model": "sir_stochastic", "name": "gillespie",
        "params": {"lam": 0.5, "mu": 0.25},
        "cells": 1, "cell_volume": 1.0, "population_scale": 1e4,
        "init": {"s": 9990, "i": 10},
        "t_end": 40, "sample_dt": 1.0, "runs": 20, "seed": 42,
    },
}

SPATIAL_PRESETS = tuple(k for k, v in PRESETS.items() if v["model"] == "spatial_sir")
COMPARTMENT_PRESETS = tuple(k for k, v in PRESETS.items() if v["model"] in COMPARTMENT_MODELS)


def preset(name: str) -> dict:
    if name not in PRESETS:
        raise ScenarioError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return validate(copy.deepcopy(PRESETS[name]))


# builders


@dataclass
class CompartmentScenario:
    model: str
    params: SeirParams | QuarantineParams
    schedule: ControlSchedule | None
    init: CompartmentState
    t_end: float
    dt: float
    seir: SeirParams  # rate view used for derived statistics


def _quarantine_fn(q: dict):
    kind = q["kind"]
    if kind == "constant":
        return ConstantQuarantine(q.get("q", 0.0))
    if kind == "logistic":
        return LogisticQuarantine(q["q_max"], q["t_mid"], q["rate"])
    return PiecewiseLinearQuarantine(tuple(q["times"]), tuple(q["values"]))


def build_compartment(doc: dict) -> CompartmentScenario:
    if doc["model"] not in COMPARTMENT_MODELS:
        raise ScenarioError(f"model {doc['model']!r} is not a compartment model")
    pr = doc["params"]
    # sigma is unused by SIR models but SeirParams wants it positive
    seir = SeirParams(pr["beta0"], pr.get("sigma", 1.0), pr["gamma"], pr.get("f", 0.0), pr["n"])
    ctl = doc.get("control")
    schedule = None
    if ctl:
        schedule = ControlSchedule(pr["beta0"], ctl.get("t0", 0.0), ctl.get("alpha", 0.0),
                                   ctl.get("removal_time"))
    init = CompartmentState(**{k: float(doc["init"].get(k, 0.0)) for k in "seirdc"})
    params: SeirParams | QuarantineParams = seir
    if doc["model"] == "sir_quarantine":
        params = QuarantineParams(pr["beta0"], pr["gamma"],
                                  _quarantine_fn(doc.get("quarantine", {"kind": "constant", "q": 0.0})),
                                  pr["n"])
    return CompartmentScenario(doc["model"], params, schedule, init, float(doc["t_end"]),
                               float(doc.get("dt", 0.05)), seir)


def spatial_params(pr: dict) -> SpatialParams:
    return SpatialParams(pr["lam"], pr["mu"], pr.get("nu", 0.0), pr.get("f", 0.0), pr.get("g", 0.0),
                         pr.get("d_s", 0.0), pr.get("d_i", 0.0))


@dataclass
class SpatialScenario:
    params: SpatialParams
    grid: Grid1D
    init: DensityFields
    t_end: float
    dt: float
    snapshot_every: float | None


def build_spatial(doc: dict) -> SpatialScenario:
    if doc["model"] != "spatial_sir":
        raise ScenarioError("not a spatial scenario")
    g = doc["grid"]
    grid = make_grid(g["length"], g["n"], g.get("origin", 0.0))
    ini = doc["init"]
    if ini["kind"] == "homogeneous":
        fields = homogeneous_fields(grid, ini.get("phi_s", 0.0), ini.get("phi_i", 0.0))
    else:
        fields = gaussian_seed_fields(grid, ini.get("s_total", 0.0), ini.get("i_total", 0.0),
                                      ini.get("center", 0.0), ini.get("width", 2.0))
    return SpatialScenario(spatial_params(doc["params"]), grid, fields, float(doc["t_end"]),
                           float(doc.get("dt", 0.01)), doc.get("snapshot_every"))


def fig10b_params(mu: float = 1.1, nu: float = 1.0) -> SpatialParams:
    return SpatialParams(1.0, mu, nu, nu, 0.0, 10.0, 1.0)


def sample_grid(t_end: float, sample_dt: float):
    n = int(math.floor(t_end / sample_dt + 1e-9))
    return [k * sample_dt for k in range(n + 1)]
