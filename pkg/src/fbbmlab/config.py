"""Scenario configuration: JSON parsing, validation that collects every
violation, defaults, and canonical hashing for reproducible outputs.

A config is a single JSON object selecting one scenario and its numeric
parameters.  Validation never stops at the first problem: the caller
gets the full list, each violation naming its field.  The resolved
config (defaults applied, output directory and emit flags stripped)
hashes to a stable id that tags every file the run writes.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

SCENARIOS = ("evolve", "groundstate", "stein", "commutators", "weighted-growth", "ucp")

EMIT_KEYS = ("csv", "json", "plotdata")

RATIO_FAMILY_PARAMS = {
    "generator": ("alpha",),
    "hilbert": ("l", "m"),
    "fractional": ("alpha", "beta"),
}


class ConfigError(ValueError):
    """Carries the complete list of violations, not just the first."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class ScenarioConfig:
    """A validated scenario request.

    params holds the scenario's numeric payload with defaults applied;
    seed feeds every random draw; emit selects output kinds.  config_hash
    covers scenario, params and seed, so two configs that produce the
    same numbers share the same id no matter where they write.
    """

    scenario: str
    params: dict
    seed: int
    out: str | None
    emit: dict

    def config_hash(self) -> str:
        payload = {"scenario": self.scenario, "params": self.params, "seed": self.seed}
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


# ------------------------------------------------------------- key tables

_REQUIRED = object()


def _positive(name):
    return lambda v: None if v > 0 else f"{name} must be positive"


def _alpha_range(v):
    return None if 0.0 < v <= 2.0 else "alpha must lie in (0, 2]"


def _pow2(v):
    return None if v >= 16 and (v & (v - 1)) == 0 else "n must be a power of two with n >= 16"


def _speed(v):
    return None if v is None or v > 1.0 else "wave speed c must exceed 1"


def _power(v):
    return None if v >= 2 else "nonlinearity power k must be >= 2"


def _window(v):
    if v is None:
        return None
    if (
        not isinstance(v, (list, tuple))
        or len(v) != 2
        or not all(isinstance(w, (int, float)) and not isinstance(w, bool) for w in v)
    ):
        return "window must be a pair of numbers [lo, hi]"
    lo, hi = float(v[0]), float(v[1])
    return None if 0 < lo < hi else "window must satisfy 0 < lo < hi"


def _stride(v):
    return None if v is None or v >= 1 else "snapshot_stride must be >= 1"


def _profile(v):
    return None if v in ("gaussian", "odd-gaussian") else (
        "profile must be 'gaussian' or 'odd-gaussian'"
    )


def _pairs_checker(second_name, second_check):
    def check(v):
        if not isinstance(v, list) or not v:
            return f"pairs must be a nonempty list of [alpha, {second_name}] pairs"
        for i, entry in enumerate(v):
            if (
                not isinstance(entry, (list, tuple))
                or len(entry) != 2
                or not all(
                    isinstance(w, (int, float)) and not isinstance(w, bool)
                    for w in entry
                )
            ):
                return f"pairs[{i}] must be a two-number pair [alpha, {second_name}]"
            a, s = float(entry[0]), float(entry[1])
            if not 0.0 < a <= 2.0:
                return f"pairs[{i}]: alpha must lie in (0, 2]"
            bad = second_check(a, s)
            if bad:
                return f"pairs[{i}]: {bad}"
        return None

    return check


def _stein_second(alpha, theta):
    if theta <= 0:
        return "theta must be positive"
    if theta == alpha:
        return "theta must differ from alpha (equal orders have no power law)"
    return None


def _growth_second(alpha, r):
    if r < 0:
        return "decay order r must be >= 0"
    if r >= 1.5 + alpha:
        return "decay order r must stay below 3/2 + alpha"
    return None


def _families(v):
    if not isinstance(v, list) or not v:
        return "families must be a nonempty list of family objects"
    for i, entry in enumerate(v):
        if not isinstance(entry, dict) or "family" not in entry:
            return f"families[{i}] must be an object with a 'family' key"
        fam = entry["family"]
        if fam not in RATIO_FAMILY_PARAMS:
            return f"families[{i}]: unknown family {fam!r}"
        want = set(RATIO_FAMILY_PARAMS[fam])
        got = set(entry) - {"family"}
        if got != want:
            return f"families[{i}]: family {fam!r} takes parameters {sorted(want)}"
    return None


# (kind, default, checker). kind "number" accepts ints, "int" only ints.
_COMMON = {
    "n": ("int", _REQUIRED, _pow2),
    "L": ("number", _REQUIRED, _positive("L")),
    "alpha": ("number", _REQUIRED, _alpha_range),
}

_TABLES = {
    "evolve": {
        **_COMMON,
        "dt": ("number", _REQUIRED, _positive("dt")),
        "T": ("number", _REQUIRED, _positive("T")),
        "k": ("int", 2, _power),
        "amplitude": ("number", 1.0, None),
        "width": ("number", 5.0, _positive("width")),
        "center": ("number", 0.0, None),
        "linear_only": ("bool", False, None),
        "snapshot_stride": ("int?", None, _stride),
    },
    "groundstate": {
        **_COMMON,
        "tol": ("number", 1e-10, _positive("tol")),
        "c": ("number?", None, _speed),
        "window": ("list?", None, _window),
        "assert_tail": ("bool", False, None),
    },
    "stein": {
        "pairs": (
            "list",
            [[0.25, 0.5], [0.5, 0.75], [0.25, 0.75]],
            _pairs_checker("theta", _stein_second),
        ),
    },
    "commutators": {
        "n": ("int", 2048, _pow2),
        "L": ("number", 50.0, _positive("L")),
        "size": ("int", 50, _positive("size")),
        "families": (
            "list",
            [
                {"family": "generator", "alpha": 0.5},
                {"family": "hilbert", "l": 0, "m": 1},
                {"family": "hilbert", "l": 1, "m": 1},
                {"family": "fractional", "alpha": 0.25, "beta": 0.5},
            ],
            _families,
        ),
    },
    "weighted-growth": {
        "n": ("int", 16384, _pow2),
        "L": ("number", 1500.0, _positive("L")),
        "t_max": ("number", 40.0, _positive("t_max")),
        "t_count": ("int", 40, _positive("t_count")),
        "pairs": (
            "list",
            [[0.5, 0.7], [0.5, 1.2], [0.75, 1.8]],
            _pairs_checker("r", _growth_second),
        ),
    },
    "ucp": {
        **_COMMON,
        "dt": ("number", _REQUIRED, _positive("dt")),
        "T": ("number", _REQUIRED, _positive("T")),
        "k": ("int", 2, _power),
        "t1": ("number", 0.0, None),
        "t2": ("number?", None, None),
        "profile": ("str", "gaussian", _profile),
        "mean": ("number", 0.5, None),
        "width": ("number", 1.0, _positive("width")),
        "snapshot_stride": ("int?", None, _stride),
    },
}

# scenario-wide rules that look at more than one field
def _cross_evolve(p, bad):
    _check_step_count(p, bad)


def _check_step_count(p, bad):
    if p.get("dt", 0) > 0 and p.get("T", 0) > 0:
        steps = p["T"] / p["dt"]
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            bad.append("T must be an integer multiple of dt")


def _cross_ucp(p, bad):
    _check_step_count(p, bad)
    if p.get("t2") is None and p.get("T") is not None:
        p["t2"] = float(p["T"])
    t1, t2, T = p.get("t1"), p.get("t2"), p.get("T")
    if t1 is not None and t1 < 0:
        bad.append("t1 must be >= 0")
    if t1 is not None and t2 is not None and not t1 < t2:
        bad.append("t1 < t2 required")
    if t2 is not None and T is not None and t2 > T + 1e-12:
        bad.append("t2 must not exceed T")


def _cross_groundstate(p, bad):
    w, L = p.get("window"), p.get("L")
    if w is not None and L and _window(w) is None and w[1] > 0.7 * L:
        bad.append("window must stay inside 0.7 L (periodic images beyond)")


_CROSS = {
    "evolve": _cross_evolve,
    "ucp": _cross_ucp,
    "groundstate": _cross_groundstate,
}

_DEFAULT_SEED = 20260819


def _check_kind(key, kind, value, bad):
    optional = kind.endswith("?")
    base = kind.rstrip("?")
    if value is None:
        if optional:
            return None
        bad.append(f"{key} must not be null")
        return None
    if base == "bool":
        if not isinstance(value, bool):
            bad.append(f"{key} must be a boolean")
            return None
        return value
    if isinstance(value, bool):
        bad.append(f"{key} must be a number, got a boolean")
        return None
    if base == "int":
        if not isinstance(value, int):
            bad.append(f"{key} must be an integer")
            return None
        return value
    if base == "number":
        if not isinstance(value, (int, float)):
            bad.append(f"{key} must be a number")
            return None
        return float(value)
    if base == "str":
        if not isinstance(value, str):
            bad.append(f"{key} must be a string")
            return None
        return value
    if base == "list":
        if not isinstance(value, list):
            bad.append(f"{key} must be a list")
            return None
        return value
    raise AssertionError(f"unhandled kind {kind}")


def validate_config(obj) -> ScenarioConfig:
    """Validate a decoded config object; raises ConfigError with every
    violation found, or returns the resolved ScenarioConfig."""
    bad: list[str] = []
    if not isinstance(obj, dict):
        raise ConfigError(["config must be a JSON object"])
    scenario = obj.get("scenario")
    if scenario not in SCENARIOS:
        raise ConfigError(
            [f"scenario must be one of {', '.join(SCENARIOS)}, got {scenario!r}"]
        )
    table = _TABLES[scenario]

    reserved = {"scenario", "seed", "out", "emit"}
    for key in sorted(set(obj) - reserved - set(table)):
        bad.append(f"unknown key {key!r} for scenario {scenario!r}")

    params: dict = {}
    for key, (kind, default, check) in table.items():
        if key in obj:
            val = _check_kind(key, kind, obj[key], bad)
        elif default is _REQUIRED:
            bad.append(f"missing required key {key!r}")
            continue
        else:
            val = default
        if val is not None and check is not None:
            msg = check(val)
            if msg:
                bad.append(msg)
                continue
        params[key] = val

    seed = obj.get("seed", _DEFAULT_SEED)
    if isinstance(seed, bool) or not isinstance(seed, int):
        bad.append("seed must be an integer")
        seed = _DEFAULT_SEED

    out = obj.get("out")
    if out is not None and not isinstance(out, str):
        bad.append("out must be a string path")
        out = None

    emit = {"csv": True, "json": True, "plotdata": False}
    raw_emit = obj.get("emit", {})
    if not isinstance(raw_emit, dict):
        bad.append("emit must be an object with boolean flags")
    else:
        for key in sorted(set(raw_emit) - set(EMIT_KEYS)):
            bad.append(f"unknown emit flag {key!r}")
        for key in EMIT_KEYS:
            if key in raw_emit:
                if not isinstance(raw_emit[key], bool):
                    bad.append(f"emit.{key} must be a boolean")
                else:
                    emit[key] = raw_emit[key]

    cross = _CROSS.get(scenario)
    if cross is not None and not bad:
        cross(params, bad)

    if bad:
        raise ConfigError(bad)
    return ScenarioConfig(
        scenario=scenario, params=params, seed=seed, out=out, emit=emit
    )


def parse_config(text: str) -> ScenarioConfig:
    """Decode and validate a JSON config document."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(
            [f"syntax error at line {e.lineno}, column {e.colno}: {e.msg}"]
        ) from None
    return validate_config(obj)


def load_config(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
