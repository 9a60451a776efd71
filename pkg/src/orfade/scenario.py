"""Scenario files: schema, defaults, validation and run construction.

A scenario is a YAML mapping with the sections network, powers, threshold,
modes, mc, sweep and output. Unknown keys are rejected by name. A run's
metadata echoes the fully-resolved scenario under "effective_scenario";
feeding that file (or the metadata JSON itself) back reproduces the run.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import yaml

from .channel import HopParams, SamplingMode
from .montecarlo import AXES, Protocol
from .snr import AfSnrMode, DfOutageMetric, DfTauMode, NetworkConfig


class ScenarioParseError(Exception):
    """Scenario text is unparseable or structurally unknown (exit code 2)."""


class ScenarioFieldError(Exception):
    """A scenario value is physically or semantically invalid (exit code 3)."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


DEFAULT_POWER_POINTS = [float(v) for v in range(0, 31)]

DEFAULTS = {
    "network": {"l": 3, "mu_db": 0.0, "sigma_db": 4.0, "rho": 1.0},
    "powers": {"equal_power": True, "p_over_n0_db": DEFAULT_POWER_POINTS},
    "threshold": {"gamma_th": 3.0},
    "modes": {
        "protocol": "df",
        "df_tau_mode": "normalized",
        "df_outage_on": "selection",
        "af_snr_mode": "simplified",
        "sampling": "true_lognormal",
    },
    "mc": {"trials": 1_000_000, "seed": 12345},
    "output": {"path": None, "format": "csv", "plot": "auto"},
}

_HOP_KEYS = {"mu_db", "sigma_db", "rho"}
_SECTION_KEYS = {
    "network": {"l", "mu_db", "sigma_db", "rho", "branches"},
    "powers": {"equal_power", "p_over_n0_db", "p_r_over_n0_db"},
    "threshold": {"gamma_th"},
    "modes": {"protocol", "df_tau_mode", "df_outage_on", "af_snr_mode", "sampling"},
    "mc": {"trials", "seed"},
    "sweep": {"axis", "points"},
    "output": {"path", "format", "plot"},
}

_MODE_VALUES = {
    "protocol": {p.value: p for p in Protocol},
    "df_tau_mode": {m.value: m for m in DfTauMode},
    "df_outage_on": {m.value: m for m in DfOutageMetric},
    "af_snr_mode": {m.value: m for m in AfSnrMode},
    "sampling": {m.value: m for m in SamplingMode},
}


@dataclass(frozen=True)
class RunSpec:
    """Everything the runner needs, extracted from one scenario."""

    cfg: NetworkConfig
    protocol: Protocol
    sampling: SamplingMode
    axis: str
    points: tuple[float, ...]
    trials: int
    seed: int
    output_path: str | None
    output_format: str
    plot: str  # "auto" | "on" | "off"
    effective: dict


def load_scenario(path) -> dict:
    """Read and parse a scenario file (YAML; JSON metadata files also work)."""
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ScenarioParseError(f"cannot read scenario file: {err}") from err
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as err:
        mark = getattr(err, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ScenarioParseError(f"could not parse scenario{where}: {err}") from err
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ScenarioParseError("scenario must be a mapping of sections")
    if "effective_scenario" in doc:
        doc = doc["effective_scenario"]
        if not isinstance(doc, dict):
            raise ScenarioParseError("effective_scenario must be a mapping")
    return doc


def apply_overrides(doc: dict, assignments) -> dict:
    """Apply --set key.path=value pairs on top of the file values."""
    out = copy.deepcopy(doc)
    for text in assignments:
        if "=" not in text:
            raise ScenarioParseError(f"override must look like key=value: {text!r}")
        key, raw = text.split("=", 1)
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError:
            value = raw
        parts = [p for p in key.strip().split(".") if p]
        if not parts:
            raise ScenarioParseError(f"override has an empty key: {text!r}")
        node = out
        for part in parts[:-1]:
            nxt = node.get(part)
            if nxt is None:
                nxt = node[part] = {}
            if not isinstance(nxt, dict):
                raise ScenarioParseError(f"override path {key!r} crosses a non-mapping value")
            node = nxt
        node[parts[-1]] = value
    return out


def _reject_unknown(doc: dict) -> None:
    for section, value in doc.items():
        if section not in _SECTION_KEYS:
            raise ScenarioParseError(f"unknown scenario key: {section}")
        if value is None:
            continue
        if not isinstance(value, dict):
            raise ScenarioParseError(f"scenario section {section} must be a mapping")
        for key in value:
            if key not in _SECTION_KEYS[section]:
                raise ScenarioParseError(f"unknown scenario key: {section}.{key}")
    branches = (doc.get("network") or {}).get("branches")
    if branches is None:
        return
    if not isinstance(branches, list):
        raise ScenarioParseError("network.branches must be a list")
    for i, branch in enumerate(branches):
        if not isinstance(branch, dict):
            raise ScenarioParseError(f"network.branches[{i}] must be a mapping")
        for key in branch:
            if key not in {"sr", "rd"}:
                raise ScenarioParseError(f"unknown scenario key: network.branches[{i}].{key}")
        for side in ("sr", "rd"):
            hop = branch.get(side)
            if hop is None:
                continue
            if not isinstance(hop, dict):
                raise ScenarioParseError(f"network.branches[{i}].{side} must be a mapping")
            for key in hop:
                if key not in _HOP_KEYS:
                    raise ScenarioParseError(
                        f"unknown scenario key: network.branches[{i}].{side}.{key}")


def _number(value, field, minimum=None, strict_min=None, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioFieldError(field, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ScenarioFieldError(field, "must be finite")
    if integer:
        if int(value) != value:
            raise ScenarioFieldError(field, "must be an integer")
        value = int(value)
    if minimum is not None and value < minimum:
        raise ScenarioFieldError(field, f"must be >= {minimum}")
    if strict_min is not None and value <= strict_min:
        raise ScenarioFieldError(field, f"must be > {strict_min}")
    return value


def _points_list(value, field):
    if isinstance(value, dict):
        extra = set(value) - {"start", "stop", "num"}
        if extra:
            raise ScenarioFieldError(field, f"unknown range keys: {sorted(extra)}")
        try:
            start = float(value["start"])
            stop = float(value["stop"])
            num = int(value["num"])
        except (KeyError, TypeError, ValueError) as err:
            raise ScenarioFieldError(field, f"range needs numeric start/stop/num ({err})")
        if num < 1:
            raise ScenarioFieldError(field, "range num must be >= 1")
        if num == 1:
            return [start]
        step = (stop - start) / (num - 1)
        return [start + i * step for i in range(num)]
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return [float(value)]
    if isinstance(value, list) and value:
        return [float(_number(v, f"{field}[{i}]")) for i, v in enumerate(value)]
    raise ScenarioFieldError(field, "expected a number, a nonempty list, or start/stop/num")


def _hop_params(raw, defaults, field) -> dict:
    merged = dict(defaults)
    merged.update(raw or {})
    hop = {
        "mu_db": float(_number(merged["mu_db"], f"{field}.mu_db")),
        "sigma_db": float(_number(merged["sigma_db"], f"{field}.sigma_db", minimum=0.0)),
        "rho": float(_number(merged["rho"], f"{field}.rho")),
    }
    if not 0.0 < hop["rho"] <= 1.0:
        raise ScenarioFieldError(f"{field}.rho", "must lie in (0, 1]")
    return hop


def effective_scenario(doc: dict) -> dict:
    """Resolve defaults and shorthands into a canonical scenario mapping."""
    _reject_unknown(doc)
    doc = {k: (v or {}) for k, v in doc.items()}

    net = {**DEFAULTS["network"], **doc.get("network", {})}
    hop_defaults = {k: net[k] for k in ("mu_db", "sigma_db", "rho")}
    raw_branches = net.get("branches")
    if raw_branches is None:
        count = _number(net["l"], "network.l", minimum=1, integer=True)
        raw_branches = [{} for _ in range(count)]
    elif "l" in doc.get("network", {}):
        count = _number(net["l"], "network.l", minimum=1, integer=True)
        if count != len(raw_branches):
            raise ScenarioFieldError(
                "network.l", f"is {count} but network.branches has {len(raw_branches)} entries")
    if not raw_branches:
        raise ScenarioFieldError("network.branches", "must not be empty")
    branches = []
    for i, branch in enumerate(raw_branches):
        field = f"network.branches[{i}]"
        branches.append({
            "sr": _hop_params(branch.get("sr"), hop_defaults, f"{field}.sr"),
            "rd": _hop_params(branch.get("rd"), hop_defaults, f"{field}.rd"),
        })

    powers = {**DEFAULTS["powers"], **doc.get("powers", {})}
    if not isinstance(powers["equal_power"], bool):
        raise ScenarioFieldError("powers.equal_power", "must be true or false")
    power_points = _points_list(powers["p_over_n0_db"], "powers.p_over_n0_db")
    if powers["equal_power"]:
        if powers.get("p_r_over_n0_db") is not None:
            raise ScenarioFieldError(
                "powers.p_r_over_n0_db", "not allowed when equal_power is true")
        p_r_db = None
    else:
        if powers.get("p_r_over_n0_db") is None:
            raise ScenarioFieldError(
                "powers.p_r_over_n0_db", "required when equal_power is false")
        p_r_db = float(_number(powers["p_r_over_n0_db"], "powers.p_r_over_n0_db"))

    threshold = {**DEFAULTS["threshold"], **doc.get("threshold", {})}
    gamma_th = float(_number(threshold["gamma_th"], "threshold.gamma_th", minimum=0.0))

    modes = {**DEFAULTS["modes"], **doc.get("modes", {})}
    for key, valid in _MODE_VALUES.items():
        if modes[key] not in valid:
            raise ScenarioFieldError(
                f"modes.{key}", f"must be one of {sorted(valid)}, got {modes[key]!r}")

    mc = {**DEFAULTS["mc"], **doc.get("mc", {})}
    trials = _number(mc["trials"], "mc.trials", minimum=1, integer=True)
    seed = _number(mc["seed"], "mc.seed", minimum=0, integer=True)
    if seed >= 2**64:
        raise ScenarioFieldError("mc.seed", "must fit in an unsigned 64-bit integer")

    sweep_sec = doc.get("sweep", {})
    if sweep_sec:
        axis = sweep_sec.get("axis", "power_db")
        if axis not in AXES:
            raise ScenarioFieldError("sweep.axis", f"must be one of {AXES}, got {axis!r}")
        if "points" in sweep_sec:
            points = _points_list(sweep_sec["points"], "sweep.points")
        elif axis == "power_db":
            points = power_points
        else:
            raise ScenarioFieldError("sweep.points", f"required for axis {axis}")
    else:
        axis = "power_db"
        points = power_points
    points = sorted(points)
    base_power_db = power_points[0] if axis == "power_db" else power_points[0]
    if axis != "power_db" and len(power_points) != 1:
        raise ScenarioFieldError(
            "powers.p_over_n0_db", f"must be a single value when sweeping {axis}")

    output = {**DEFAULTS["output"], **doc.get("output", {})}
    if output["format"] not in ("csv", "json"):
        raise ScenarioFieldError("output.format", "must be 'csv' or 'json'")
    plot = output["plot"]
    if plot is True:
        plot = "on"
    elif plot is False:
        plot = "off"
    if plot not in ("auto", "on", "off"):
        raise ScenarioFieldError("output.plot", "must be true, false, or 'auto'")
    if output["path"] is not None and not isinstance(output["path"], str):
        raise ScenarioFieldError("output.path", "must be a string path")

    eff = {
        "network": {"branches": branches},
        "powers": {"equal_power": powers["equal_power"],
                   "p_over_n0_db": float(base_power_db)},
        "threshold": {"gamma_th": gamma_th},
        "modes": dict(modes),
        "mc": {"trials": trials, "seed": seed},
        "sweep": {"axis": axis, "points": [float(v) for v in points]},
        "output": {"path": output["path"], "format": output["format"], "plot": plot},
    }
    if p_r_db is not None:
        eff["powers"]["p_r_over_n0_db"] = p_r_db
    return eff


def build_run(doc: dict) -> RunSpec:
    """Validate a scenario and turn it into a RunSpec."""
    eff = effective_scenario(doc)
    branches = []
    for i, branch in enumerate(eff["network"]["branches"]):
        hops = []
        for side in ("sr", "rd"):
            h = branch[side]
            try:
                hops.append(HopParams(h["mu_db"], h["sigma_db"], h["rho"]))
            except ValueError as err:
                raise ScenarioFieldError(f"network.branches[{i}].{side}", str(err))
        branches.append(tuple(hops))

    p_s = 10.0 ** (eff["powers"]["p_over_n0_db"] / 10.0)
    p_r = (p_s if eff["powers"]["equal_power"]
           else 10.0 ** (eff["powers"]["p_r_over_n0_db"] / 10.0))
    modes = eff["modes"]
    try:
        cfg = NetworkConfig(
            branches=tuple(branches),
            p_s=p_s, p_r=p_r, n0=1.0,
            gamma_th=eff["threshold"]["gamma_th"],
            df_tau_mode=_MODE_VALUES["df_tau_mode"][modes["df_tau_mode"]],
            df_outage_on=_MODE_VALUES["df_outage_on"][modes["df_outage_on"]],
            af_snr_mode=_MODE_VALUES["af_snr_mode"][modes["af_snr_mode"]],
        )
    except ValueError as err:
        raise ScenarioFieldError("network", str(err))
    return RunSpec(
        cfg=cfg,
        protocol=_MODE_VALUES["protocol"][modes["protocol"]],
        sampling=_MODE_VALUES["sampling"][modes["sampling"]],
        axis=eff["sweep"]["axis"],
        points=tuple(eff["sweep"]["points"]),
        trials=eff["mc"]["trials"],
        seed=eff["mc"]["seed"],
        output_path=eff["output"]["path"],
        output_format=eff["output"]["format"],
        plot=eff["output"]["plot"],
        effective=eff,
    )


def config_digest(effective: dict) -> str:
    """Digest of everything that shapes the numbers (output section excluded)."""
    payload = {k: v for k, v in effective.items() if k != "output"}
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return "sha256:" + hashlib.sha256(blob).hexdigest()
