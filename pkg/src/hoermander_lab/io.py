"""Config parsing and deterministic report writing for the command line runner."""
from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .karamata import KaramataFunction, constant, multilog
from .symbols import RegularityIndex

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """The experiment configuration is malformed or references unknown entities."""


# --- parsing ---------------------------------------------------------------------


def parse_phi(raw) -> KaramataFunction:
    """phi from a config entry.

    Accepted forms: a positive number (constant), ``"1"``, ``"const:v"``,
    ``"multilog:t1,t2,..."`` (so ``"multilog:1"`` is 1 + ln r), or a
    serialized ``KaramataFunction`` dict.
    """
    try:
        if isinstance(raw, (int, float)) and not isinstance(raw, bool):
            return constant(float(raw))
        if isinstance(raw, dict):
            return KaramataFunction.from_dict(raw)
        if isinstance(raw, str):
            key, _, arg = raw.partition(":")
            key = key.strip().lower()
            if key in ("1", "one") and not arg:
                return constant(1.0)
            if key == "const":
                return constant(float(arg or 1.0))
            if key == "multilog":
                return multilog(*(float(a) for a in arg.split(",") if a.strip()))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad phi entry {raw!r}: {exc}") from exc
    raise ConfigError(f"bad phi entry {raw!r}")


def phi_label(phi: KaramataFunction) -> str:
    return phi.label()


def parse_index(raw: dict) -> RegularityIndex:
    if not isinstance(raw, dict) or "s" not in raw:
        raise ConfigError(f"regularity index needs at least 's': {raw!r}")
    phi = parse_phi(raw.get("phi", 1.0))
    try:
        if "b" in raw:
            return RegularityIndex.parabolic(float(raw["s"]), int(raw["b"]), phi)
        return RegularityIndex(float(raw["s"]), float(raw.get("gamma", 1.0)), phi)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def require(cfg: dict, allowed: Iterable[str], required: Iterable[str] = ()) -> None:
    allowed = set(allowed) | {"command", "seed"}
    unknown = sorted(set(cfg) - allowed)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    missing = [k for k in required if k not in cfg]
    if missing:
        raise ConfigError(f"missing config keys: {', '.join(missing)}")


def load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("the config must be a JSON object")
    return cfg


# --- writing -----------------------------------------------------------------------


def fmt(v) -> str:
    """Stable text form: repr for floats, 'a+bj' for complex, plain str otherwise."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        if v.imag == 0:
            return fmt(v.real)
        return f"{v.real!r}{v.imag:+.17g}j"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    if isinstance(v, (np.integer,)):
        return str(int(v))
    if isinstance(v, (tuple, list)):
        return ";".join(fmt(x) for x in v)
    return str(v)


def csv_text(rows: Sequence[dict], columns: Sequence[str] | None = None) -> str:
    columns = list(columns or (rows[0].keys() if rows else []))
    buf = _io.StringIO()
    buf.write(f"# schema_version: {SCHEMA_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r.get(c, "")) for c in columns])
    return buf.getvalue()


def write_csv(path, rows: Sequence[dict], columns: Sequence[str] | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_text(rows, columns), encoding="utf-8")
    return path


def read_csv(path) -> list[dict]:
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines()
             if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        return v.real if v.imag == 0 else {"re": v.real, "im": v.imag}
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    return v


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return path
