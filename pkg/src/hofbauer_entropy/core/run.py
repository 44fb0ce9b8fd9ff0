from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, Sequence, TypeVar

from tqdm import tqdm

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def run_sweep(
    items: Sequence[T],
    work: Callable[[T], R],
    *,
    on_error: Callable[[T, Exception], R],
    concurrency: int = 1,
    desc: str = "Sweep",
    unit: str = "row",
    progress: bool = True,
) -> list[R]:
    """Run `work` over `items`, one result per item, in input order.

    Behavior:
    - A failing item does not stop the sweep; `on_error(item, exc)` supplies
      its result instead.
    - concurrency > 1 uses a thread pool; results are still returned in the
      order of `items` so output files stay deterministic.
    """

    if concurrency < 1:
        raise ValueError("concurrency must be >= 1")

    results: list[R | None] = [None] * len(items)
    pbar = tqdm(total=len(items), unit=unit, desc=desc, dynamic_ncols=True, disable=not progress)

    def _guarded(idx: int) -> R:
        item = items[idx]
        try:
            return work(item)
        except Exception as e:
            logger.warning("%s item %d failed: %s: %s", desc, idx, type(e).__name__, e)
            return on_error(item, e)

    try:
        pbar.set_postfix_str(f"{len(items)} tasks, concurrency={concurrency}")
        if concurrency == 1:
            for idx in range(len(items)):
                results[idx] = _guarded(idx)
                pbar.update(1)
        else:
            with ThreadPoolExecutor(max_workers=concurrency) as ex:
                future_to_idx = {ex.submit(_guarded, idx): idx for idx in range(len(items))}
                for fut in as_completed(future_to_idx):
                    idx = future_to_idx[fut]
                    try:
                        results[idx] = fut.result()
                    except Exception as e:
                        results[idx] = on_error(items[idx], e)
                    pbar.update(1)
    finally:
        pbar.close()

    return results  # type: ignore[return-value]


def error_text(exc: BaseException) -> str:
    return f"{type(exc).__name__}: {exc}"[:800]


def safe_path_component(text: str) -> str:
    cleaned = []
    for ch in text:
        if ch.isalnum() or ch in {"-", "_", "."}:
            cleaned.append(ch)
        else:
            cleaned.append("_")
    s = "".join(cleaned).strip("._")
    return s or "map"
