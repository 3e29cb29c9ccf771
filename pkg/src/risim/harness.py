"""Seeded Monte Carlo sweep runner with CSV/JSON emission."""

from __future__ import annotations

import dataclasses
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import yaml

from . import bd, mtzf
from .channel import synth_trial
from .config import (ConfigError, SystemConfig, UpaShape, dbm_to_watt,
                     geometry_preset)
from .rates import equal_power_allocation, min_rates, random_phases
from .sdr import SdrSettings

SCHEMA_VERSION = 1
SWEEP_AXES = ("transmit_power_dbm", "n_antennas", "users_per_group", "ris_elements")
SCHEMES = ("bd", "mtzf", "bd-random", "mtzf-random")

# fixed per-scheme stream ids so pairing is independent of scheme selection
_STREAM_IDS = {"channels": 0, "bd": 1, "bd-random": 2, "mtzf-random": 3}


@dataclass(frozen=True)
class Scenario:
    name: str
    base: SystemConfig
    sweep_axis: str
    sweep_values: tuple
    schemes: tuple
    trials: int
    master_seed: int
    base_power_dbm: float  # kept for metadata round-trips

    def validate(self) -> None:
        if self.sweep_axis not in SWEEP_AXES:
            raise ConfigError(f"unknown sweep axis {self.sweep_axis!r}")
        if list(self.sweep_values) != sorted(set(self.sweep_values)):
            raise ConfigError("sweep values must be strictly increasing")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        unknown = set(self.schemes) - set(SCHEMES)
        if unknown:
            raise ConfigError(f"unknown schemes: {sorted(unknown)}")
        self.base.validate()
        for value in self.sweep_values:
            config_at(self, value).validate()


def config_at(scenario: Scenario, value) -> SystemConfig:
    """System config at one sweep point."""
    base = scenario.base
    axis = scenario.sweep_axis
    if axis == "transmit_power_dbm":
        return replace(base, total_power=dbm_to_watt(float(value)))
    if axis == "n_antennas":
        hor = base.bs_shape.n_hor
        if value % hor != 0:
            raise ConfigError(f"N={value} not divisible by n_hor={hor}")
        return replace(base, bs_shape=UpaShape(value // hor, hor))
    if axis == "users_per_group":
        return replace(base, users_per_group=tuple([int(value)] * base.num_groups))
    if axis == "ris_elements":
        shapes = []
        for s in base.ris_shapes:
            if value % s.n_ver != 0:
                raise ConfigError(f"M={value} not divisible by n_ver={s.n_ver}")
            shapes.append(UpaShape(s.n_ver, value // s.n_ver))
        return replace(base, ris_shapes=tuple(shapes))
    raise ConfigError(f"unknown sweep axis {axis!r}")


@dataclass
class TrialRecord:
    scheme: str
    sweep_value: float
    trial: int
    sum_rate: float | None
    min_rates: list | None
    iters: int | None
    seed: int
    status: str = "ok"
    channel_hash: str = ""


@dataclass
class SweepResult:
    scenario: dict
    num_groups: int
    records: list = field(default_factory=list)

    def filtered(self, scheme=None, sweep_value=None, status="ok"):
        out = []
        for r in self.records:
            if scheme is not None and r.scheme != scheme:
                continue
            if sweep_value is not None and r.sweep_value != sweep_value:
                continue
            if status is not None and r.status != status:
                continue
            out.append(r)
        return out

    def mean_sum_rate(self, scheme, sweep_value) -> float:
        recs = self.filtered(scheme, sweep_value)
        return float(np.mean([r.sum_rate for r in recs]))

    def stderr_sum_rate(self, scheme, sweep_value) -> float:
        rates = [r.sum_rate for r in self.filtered(scheme, sweep_value)]
        if len(rates) < 2:
            return 0.0
        return float(np.std(rates, ddof=1) / math.sqrt(len(rates)))


def _trial_seed(master: int, value_index: int, trial: int, stream: str) -> np.random.SeedSequence:
    return np.random.SeedSequence((master, value_index, trial, _STREAM_IDS[stream]))


def run_point(scenario: Scenario, value_index: int, trial: int) -> list:
    """All requested schemes on one shared channel realization."""
    value = scenario.sweep_values[value_index]
    config = config_at(scenario, value)
    master = scenario.master_seed
    seed_channels = _trial_seed(master, value_index, trial, "channels")
    channels = synth_trial(config, np.random.default_rng(seed_channels))
    digest = channels.digest()
    power = equal_power_allocation(config.total_power, config.num_groups)

    records = []

    def record(scheme, rates_vec, iters):
        records.append(TrialRecord(
            scheme=scheme, sweep_value=float(value), trial=trial,
            sum_rate=float(np.sum(rates_vec)), min_rates=[float(x) for x in rates_vec],
            iters=iters, seed=master, channel_hash=digest,
        ))

    def skip(scheme, reason):
        records.append(TrialRecord(
            scheme=scheme, sweep_value=float(value), trial=trial,
            sum_rate=None, min_rates=None, iters=None, seed=master,
            status=f"skipped:{reason}", channel_hash=digest,
        ))

    bd_ok = config.bd_feasible()
    for scheme in scenario.schemes:
        if scheme == "bd":
            if not bd_ok:
                skip(scheme, "bd-infeasible")
                continue
            rng = np.random.default_rng(_trial_seed(master, value_index, trial, "bd"))
            f, phases, trace = bd.algorithm1(config, channels, rng=rng)
            record(scheme, min_rates(channels, phases, f, config.noise_power),
                   trace.iterations)
        elif scheme == "mtzf":
            f, phases, trace = mtzf.algorithm2(config, channels)
            record(scheme, min_rates(channels, phases, f, config.noise_power),
                   trace.iterations)
        elif scheme == "bd-random":
            if not bd_ok:
                skip(scheme, "bd-infeasible")
                continue
            rng = np.random.default_rng(_trial_seed(master, value_index, trial, "bd-random"))
            phases = random_phases(config, rng)
            f = bd.bd_beamformer(channels, phases, power)
            record(scheme, min_rates(channels, phases, f, config.noise_power), 1)
        elif scheme == "mtzf-random":
            rng = np.random.default_rng(_trial_seed(master, value_index, trial, "mtzf-random"))
            phases = random_phases(config, rng)
            rcs = mtzf.representative_channels(channels, phases)
            f = mtzf.mtzf_beamformer(rcs, power)
            record(scheme, min_rates(channels, phases, f, config.noise_power), 1)
        else:
            raise ConfigError(f"unknown scheme {scheme!r}")
    return records


def _run_point_star(args):
    return run_point(*args)


def default_workers() -> int:
    env = os.environ.get("RIS_SIM_THREADS")
    if env:
        return max(1, int(env))
    return 1


def run_scenario(scenario: Scenario, workers: int | None = None) -> SweepResult:
    """All (sweep value, trial) points, deterministically seeded.

    Results are identical for any worker count: every point derives its own
    seed from (master seed, value index, trial) and records are ordered by
    (value, trial, scheme).
    """
    scenario.validate()
    if workers is None:
        workers = default_workers()
    tasks = [(scenario, vi, t)
             for vi in range(len(scenario.sweep_values))
             for t in range(scenario.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_point_star, tasks, chunksize=4))
    else:
        chunks = [run_point(*t) for t in tasks]
    records = [r for chunk in chunks for r in chunk]
    order = {s: i for i, s in enumerate(SCHEMES)}
    records.sort(key=lambda r: (r.sweep_value, r.trial, order[r.scheme]))
    return SweepResult(scenario=scenario_metadata(scenario),
                       num_groups=scenario.base.num_groups, records=records)


def scenario_metadata(scenario: Scenario) -> dict:
    return {
        "name": scenario.name,
        "sweep_axis": scenario.sweep_axis,
        "sweep_values": list(scenario.sweep_values),
        "schemes": list(scenario.schemes),
        "trials": scenario.trials,
        "master_seed": scenario.master_seed,
        "num_groups": scenario.base.num_groups,
        "users_per_group": list(scenario.base.users_per_group),
        "n_antennas": scenario.base.n_antennas,
        "ris_elements": list(scenario.base.ris_elements),
        "transmit_power_dbm": scenario.base_power_dbm,
    }


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def csv_header(num_groups: int) -> list:
    cols = ["scheme", "sweep_value", "trial", "sum_rate"]
    cols += [f"min_rate_g{g + 1}" for g in range(num_groups)]
    cols += ["iters", "seed", "status"]
    return cols


def emit(result: SweepResult, fmt: str, path: str) -> None:
    """Write results as CSV (flat rows) or JSON (with scenario metadata)."""
    if fmt == "csv":
        lines = [",".join(csv_header(result.num_groups))]
        for r in result.records:
            mins = r.min_rates if r.min_rates is not None else [None] * result.num_groups
            row = [r.scheme, _fmt(r.sweep_value), _fmt(r.trial), _fmt(r.sum_rate)]
            row += [_fmt(m) for m in mins]
            row += [_fmt(r.iters), _fmt(r.seed), r.status]
            lines.append(",".join(row))
        payload = "\n".join(lines) + "\n"
        with open(path, "w") as fh:
            fh.write(payload)
    elif fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "scenario": result.scenario,
            "num_groups": result.num_groups,
            "records": [dataclasses.asdict(r) for r in result.records],
        }
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1, sort_keys=True)
            fh.write("\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")


def load_result_json(path: str) -> SweepResult:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema version {doc.get('schema_version')}")
    records = [TrialRecord(**r) for r in doc["records"]]
    return SweepResult(scenario=doc["scenario"], num_groups=doc["num_groups"],
                       records=records)


def load_scenario(path: str) -> Scenario:
    """Parse a YAML scenario file (schema documented in the README)."""
    with open(path) as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict):
        raise ConfigError("scenario file must hold a mapping")
    return scenario_from_dict(doc)


def scenario_from_dict(doc: dict) -> Scenario:
    def shape(key, default):
        raw = doc.get(key, default)
        return UpaShape(int(raw[0]), int(raw[1]))

    num_groups = int(doc.get("num_groups", 3))
    power_dbm = float(doc.get("transmit_power_dbm", 30.0))
    alg = doc.get("algorithm", {}) or {}
    sdr_doc = alg.get("sdr", {}) or {}
    sdr = SdrSettings(**sdr_doc) if sdr_doc else SdrSettings()

    channel = doc.get("channel", {}) or {}

    def link(name, builder):
        from . import config as cfg

        params = builder()
        over = channel.get(name, {}) or {}
        kwargs = {}
        for key, val in over.items():
            if key == "rician_factor_db":
                kwargs["rician_factor"] = cfg.db_to_linear(float(val))
            elif key == "reference_loss_db":
                kwargs["reference_loss"] = cfg.db_to_linear(float(val))
            elif key in ("angular_spread_ver_deg", "angular_spread_hor_deg"):
                kwargs[key[:-4]] = math.radians(float(val))
            else:
                kwargs[key] = val
        return replace(params, **kwargs)

    from . import config as cfg

    base = SystemConfig(
        bs_shape=shape("bs_shape", (2, 8)),
        ris_shapes=tuple([shape("ris_shape", (8, 3))] * num_groups),
        users_per_group=tuple([int(doc.get("users_per_group", 4))] * num_groups),
        total_power=dbm_to_watt(power_dbm),
        noise_power=dbm_to_watt(float(doc.get("noise_dbm", -114.0))),
        geometry=geometry_preset(doc.get("geometry_preset", "fig2-like-g4"), num_groups),
        bu=link("bu", cfg.default_bu_params),
        ru=link("ru", cfg.default_ru_params),
        br=link("br", cfg.default_br_params),
        eps_rate=float(alg.get("eps_rate", 1e-2)),
        eps_norm=float(alg.get("eps_norm", 1e-3)),
        max_bd_iters=int(alg.get("max_bd_iters", 10)),
        max_zf_iters=int(alg.get("max_zf_iters", 10)),
        sdr=sdr,
    )
    sweep = doc.get("sweep") or {"axis": "transmit_power_dbm", "values": [power_dbm]}
    scenario = Scenario(
        name=str(doc.get("name", "scenario")),
        base=base,
        sweep_axis=sweep["axis"],
        sweep_values=tuple(sweep["values"]),
        schemes=tuple(doc.get("schemes", list(SCHEMES))),
        trials=int(doc.get("trials", 200)),
        master_seed=int(doc.get("seed", 0)),
        base_power_dbm=power_dbm,
    )
    scenario.validate()
    return scenario


def desk_scale_scenario(**overrides) -> Scenario:
    """The default power-sweep experiment at evaluation scale."""
    doc = {
        "name": "desk-scale",
        "num_groups": 3,
        "users_per_group": 4,
        "bs_shape": [2, 8],
        "ris_shape": [8, 3],
        "transmit_power_dbm": 30.0,
        "trials": 200,
        "seed": 1,
        "sweep": {"axis": "transmit_power_dbm", "values": [20, 25, 30, 35, 40]},
        "schemes": list(SCHEMES),
    }
    doc.update(overrides)
    return scenario_from_dict(doc)
