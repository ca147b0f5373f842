import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import ValidationError

from subspaces.subspace import Tolerance

ENV_TOL_RANK = "SIMCONTRACT_TOL_RANK"
ENV_TOL_INCL = "SIMCONTRACT_TOL_INCL"


class SettingsError(ValueError):
    """Malformed tolerance setting from a flag, the environment or the model file."""


def _from_env(name: str) -> Optional[float]:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return None
    try:
        return float(raw)
    except ValueError as e:
        raise SettingsError(f"{name}={raw!r} is not a number") from e


def resolve_tolerance(rank_rel: Optional[float] = None, inclusion: Optional[float] = None,
                      file_values: Optional[dict] = None) -> Tolerance:
    """Tolerance with precedence flag > environment (.env included) > model file > default."""
    # Load .env file before reading environment variables
    load_dotenv()
    file_values = file_values or {}
    values = {}
    for field, flag, env_name in (
        ("rank_rel", rank_rel, ENV_TOL_RANK),
        ("inclusion", inclusion, ENV_TOL_INCL),
    ):
        for candidate in (flag, _from_env(env_name), file_values.get(field)):
            if candidate is not None:
                values[field] = candidate
                break
    try:
        return Tolerance(**values)
    except ValidationError as e:
        error = e.errors()[0]
        raise SettingsError(f"tolerance {error['loc'][0]}: {error['msg']}") from e
