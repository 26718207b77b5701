"""Pipeline configuration file handling.

The config is a JSON object; every field can also be given (or
overridden) as a CLI flag. The seed is mandatory wherever randomness is
involved; there is no wall-clock default. Documented schema::

    {
      "seed": 1234,
      "paths": {
        "catalog": "catalog.csv",
        "stage_manifest": "stages.jsonl",
        "pools": "pools.jsonl",
        "media_dir": "media/",
        "out_dir": "out/"
      },
      "variant": "w-pp-3s",
      "keywords": ["muziek"],
      "catalog_filter": {"allow_genres": [], "deny_genres": [], "max_duration_s": 10800},
      "augment": {"mode": "mix-noise", "fraction": 0.10, "snr_range": [0, 15]},
      "batch": {"token_budget": 4800000, "sample_rate": 16000},
      "schedule": {"kind": "triangular", "peak_lr": 1e-4, "steps_up": 25000, "steps_down": 25000}
    }
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

from .errors import UsageError

_KNOWN_KEYS = {
    "seed",
    "paths",
    "variant",
    "keywords",
    "catalog_filter",
    "augment",
    "batch",
    "schedule",
}

WORKERS_ENV = "SPRAAKPREP_WORKERS"


def load_config(path) -> dict:
    """Parse and validate a pipeline config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError(f"config {path} must be a JSON object")
    unknown = set(cfg) - _KNOWN_KEYS
    if unknown:
        raise UsageError(f"config {path} has unknown keys: {sorted(unknown)}")
    if "seed" in cfg and not isinstance(cfg["seed"], int):
        raise UsageError("config seed must be an integer")
    paths = cfg.get("paths", {})
    if not isinstance(paths, dict):
        raise UsageError("config paths must be an object")
    for name, p in paths.items():
        if p is not None and not Path(p).exists():
            raise UsageError(f"config path {name!r} does not exist: {p}")
    return cfg


def params_hash(params: dict) -> str:
    """Stable digest of the effective parameters of one subcommand run."""
    canonical = json.dumps(params, sort_keys=True, ensure_ascii=False, default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def worker_count(flag_value: int | None) -> int:
    """Worker count: env override beats the flag, default 1."""
    env = os.environ.get(WORKERS_ENV)
    if env is not None:
        try:
            n = int(env)
        except ValueError:
            raise UsageError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
        if n < 1:
            raise UsageError(f"{WORKERS_ENV} must be >= 1")
        return n
    if flag_value is None:
        return 1
    if flag_value < 1:
        raise UsageError("--workers must be >= 1")
    return flag_value
