from __future__ import annotations

import os

from hofbauer_entropy.core.dotenv import env_name


def _env_float(key: str, default: str) -> float:
    return float(os.environ.get(env_name(key), default))


def eps_root() -> float:
    """Root tolerance for non-polynomial branches.

    Tuning via env vars (read at call time so `.env` files apply):
    - HOFBAUER_ENTROPY_EPS_ROOT (default 1e-12)
    """

    return _env_float("eps_root", "1e-12")


def eps_geom() -> float:
    # Interval equality and boundary proximity in float mode.
    return _env_float("eps_geom", "1e-10")


def eps_eig() -> float:
    return _env_float("eps_eig", "1e-12")


def lap_budget() -> int:
    # Maximum number of distinct image intervals tracked while pushing laps.
    return int(os.environ.get(env_name("lap_budget"), "200000"))


def max_branches() -> int:
    return int(os.environ.get(env_name("max_branches"), "10000"))
