"""Shared plumbing: seed derivation, canonical JSON, bounded parallel map."""

from __future__ import annotations

import json
import os
import zlib
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def _key_to_int(key) -> int:
    if isinstance(key, (int, np.integer)):
        return int(key) & 0xFFFFFFFF
    return zlib.crc32(str(key).encode("utf-8"))


def child_rng(seed: int, *keys) -> np.random.Generator:
    """Deterministic per-task generator derived from a master seed.

    Every randomized unit of work (a permutation repeat, a noise repeat, a
    carve-out, a background draw) gets its own generator keyed by stable
    identifiers, so results do not depend on execution order or thread
    schedule.
    """
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [_key_to_int(k) for k in keys]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def canonical_json(obj) -> str:
    """The one JSON serialization used by reports, CLI output and the service.

    Sorted keys and fixed separators make equal objects byte-identical.
    """
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False)


def thread_budget() -> int:
    """Parallelism cap from WORKBENCH_THREADS (default 1: fully serial)."""
    raw = os.environ.get("WORKBENCH_THREADS", "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(fn, items):
    """Map preserving order; runs on a bounded thread pool when allowed.

    Each item must carry everything its task needs (including any derived
    seed), so the result is independent of the schedule.
    """
    items = list(items)
    workers = min(thread_budget(), len(items)) if items else 1
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def sigmoid(z):
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out
