"""Tolerances and run defaults for the design / walk / sampling pipeline."""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any

from dotenv import load_dotenv
from loguru import logger

_ROOT = Path(__file__).resolve().parent
SETTINGS_PATH = _ROOT / "designwalk_settings.json"

TOL_ENV = "DESIGNWALK_TOL"

DEFAULT_SETTINGS: dict[str, Any] = {
    # Absolute slack on every bound / orthogonality check.
    "verification_tol": 1e-9,
    # Orthonormality and eigen-equation residual accepted from decompose.
    "basis_tol": 1e-10,
    "jacobi_threshold": 1e-13,
    "jacobi_max_sweeps": 100,
    "eigen_group_tol": 1e-9,
    "nullspace_rcond": 1e-11,
    # Weights below ratio * max-weight are clamped to exactly 0.
    "zero_clamp_ratio": 1e-11,
    "random_regular_retries": 1000,
    "rate_floor": 1e-24,
    "steps": 50,
    "seed": 0,
    "sampling_trials": 100,
}

_INT_KEYS = {"jacobi_max_sweeps", "random_regular_retries", "steps", "seed", "sampling_trials"}

VERIFICATION_TOL: float = DEFAULT_SETTINGS["verification_tol"]
BASIS_TOL: float = DEFAULT_SETTINGS["basis_tol"]
JACOBI_THRESHOLD: float = DEFAULT_SETTINGS["jacobi_threshold"]
JACOBI_MAX_SWEEPS: int = DEFAULT_SETTINGS["jacobi_max_sweeps"]
EIGEN_GROUP_TOL: float = DEFAULT_SETTINGS["eigen_group_tol"]
NULLSPACE_RCOND: float = DEFAULT_SETTINGS["nullspace_rcond"]
ZERO_CLAMP_RATIO: float = DEFAULT_SETTINGS["zero_clamp_ratio"]
RANDOM_REGULAR_RETRIES: int = DEFAULT_SETTINGS["random_regular_retries"]
RATE_FLOOR: float = DEFAULT_SETTINGS["rate_floor"]


def clamp_tolerance(value: Any) -> float:
    """Verification tolerance kept within [1e-15, 1e-3]; unparsable input gives the default."""
    try:
        tol = float(value)
    except (TypeError, ValueError):
        tol = float(DEFAULT_SETTINGS["verification_tol"])
    if tol != tol:  # NaN
        tol = float(DEFAULT_SETTINGS["verification_tol"])
    return max(1e-15, min(1e-3, tol))


def _coerce_settings(data: dict[str, Any]) -> dict[str, Any]:
    for key in _INT_KEYS:
        try:
            data[key] = int(data[key])
        except (TypeError, ValueError):
            data[key] = DEFAULT_SETTINGS[key]
    for key, default in DEFAULT_SETTINGS.items():
        if key in _INT_KEYS:
            continue
        try:
            data[key] = float(data[key])
        except (TypeError, ValueError):
            data[key] = default
    data["verification_tol"] = clamp_tolerance(data["verification_tol"])
    data["steps"] = max(0, data["steps"])
    data["sampling_trials"] = max(1, data["sampling_trials"])
    return data


def load_settings(path: str | Path | None = None) -> dict[str, Any]:
    """Defaults, overlaid by the JSON settings file, overlaid by the environment."""
    load_dotenv(_ROOT / ".env", override=False)
    data = dict(DEFAULT_SETTINGS)
    settings_path = Path(path) if path else SETTINGS_PATH
    if settings_path.exists():
        try:
            loaded = json.loads(settings_path.read_text(encoding="utf-8"))
            if isinstance(loaded, dict):
                for key, value in loaded.items():
                    if key in DEFAULT_SETTINGS:
                        data[key] = value
            else:
                logger.warning(f"{settings_path} is not a JSON object; using defaults")
        except (json.JSONDecodeError, OSError) as exc:
            logger.warning(f"could not read {settings_path} ({exc}); using defaults")
    raw_tol = os.getenv(TOL_ENV, "").strip()
    if raw_tol:
        data["verification_tol"] = raw_tol
    return _coerce_settings(data)
