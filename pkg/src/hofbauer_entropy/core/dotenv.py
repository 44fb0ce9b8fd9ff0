from __future__ import annotations

import os
from pathlib import Path

from dotenv import find_dotenv, load_dotenv

ENV_PREFIX = "HOFBAUER_ENTROPY_"
OUTPUT_DIR_ENV = f"{ENV_PREFIX}OUTPUT_DIR"


def env_name(key: str) -> str:
    return f"{ENV_PREFIX}{key.upper()}"


def load_dotenv_if_present(filename: str = ".env") -> Path | None:
    """Load `HOFBAUER_ENTROPY_*` settings from the nearest `.env` file.

    The search starts in the current working directory and walks upwards.
    Variables already set in the shell are left alone. Returns the file that
    was loaded, or None when there is none.
    """

    found = find_dotenv(filename=filename, usecwd=True)
    if not found:
        return None
    path = Path(found).resolve()
    if not path.is_file():
        return None
    load_dotenv(dotenv_path=path, override=False)
    return path


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV) or ".output")
