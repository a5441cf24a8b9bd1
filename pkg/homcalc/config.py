from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from pathlib import Path

from homcalc.errors import ScenarioError

DEFAULT_SEED = 42


@dataclass(frozen=True)
class Settings:
    seed: int = DEFAULT_SEED
    samples: int = 20
    tolerance: float = 1e-7
    sample_low: float = 0.1
    sample_high: float = 2.0
    random_pairs: int = 5
    max_inverse_size: int = 6
    workers: int = 1
    log_dir: str = "logs"

    def with_overrides(self, **overrides) -> Settings:
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


DEFAULT_SETTINGS = Settings()


def load_settings(path: Path | None = None) -> Settings:
    if path is None:
        return DEFAULT_SETTINGS
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"Could not read settings file {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ScenarioError(f"Settings file {path} must contain a JSON object")
    known = {f.name for f in fields(Settings)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ScenarioError(f"Unknown settings: {', '.join(unknown)}", symbol=unknown[0])
    return replace(DEFAULT_SETTINGS, **raw)
