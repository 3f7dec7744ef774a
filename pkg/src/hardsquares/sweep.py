"""Stability sweeps: compare homology of square configurations with point configurations."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import IO, Iterable, Sequence

from . import __version__
from .config import DEFAULT_CELL_CAP, FORMAT_VERSION, BudgetExceeded, config_complex
from .homology import betti_numbers
from .wheels import betti_fn

log = logging.getLogger(__name__)

CACHE_ENV = "HARDSQUARES_CACHE"
BUDGET_EXCEEDED = "budget-exceeded"
COLUMNS = ["n", "w", "h", "k", "betti_square", "betti_point", "stable_range", "k1_range", "agrees", "cells", "seconds"]


def in_stable_range(n: int, w: int, h: int, k: int) -> bool:
    """Bounds of the general stability theorem (``h`` taken as the shorter side)."""
    short = min(w, h)
    return short >= k + 2 and w * h - n >= max((k + 1) * (k + 2), short * k + 2)


def in_k1_range(n: int, w: int, h: int, k: int) -> bool:
    """The sharper first-homology bound: six free cells and both sides at least 3."""
    return k == 1 and min(w, h) >= 3 and w * h - n >= 6


@dataclass(frozen=True)
class SweepSpec:
    n_values: tuple[int, ...]
    w_max: int
    h_max: int
    k_max: int
    w_min: int = 2
    h_min: int = 2
    coefficients: str | int = "rationals"
    budget: int = DEFAULT_CELL_CAP
    cache_dir: str | None = None
    jobs: int = 1

    def __post_init__(self):
        if not self.n_values or min(self.n_values) < 1:
            raise ValueError("need a nonempty range of n >= 1")
        if self.w_min < 2 or self.h_min < 2 or self.w_max < self.w_min or self.h_max < self.h_min:
            raise ValueError("board ranges must be nonempty with sides >= 2")
        if self.k_max < 0:
            raise ValueError("k_max must be nonnegative")
        if self.budget <= 0:
            raise ValueError("budget must be positive")


@dataclass(frozen=True)
class SweepRow:
    n: int
    w: int
    h: int
    k: int
    betti_square: int | str
    betti_point: int
    stable_range: bool
    k1_range: bool
    agrees: bool | None  # None when the complex was over budget
    cells: int | None
    seconds: float | None

    def as_dict(self) -> dict:
        return asdict(self)


def cache_key(w: int, h: int, n: int, coefficients: str | int, subdivision: str = "cubical") -> str:
    doc = {
        "w": w,
        "h": h,
        "n": n,
        "subdivision": subdivision,
        "coefficients": str(coefficients),
        "version": [__version__, FORMAT_VERSION],
    }
    return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()[:32]


def _write_atomic(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _prepare_cache(cache_dir: str | None) -> Path | None:
    if cache_dir is None:
        return None
    path = Path(cache_dir)
    try:
        path.mkdir(parents=True, exist_ok=True)
        probe = path / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as e:
        raise OSError(f"cache directory {path} is not writable: {e}") from e
    return path


def board_homology(w: int, h: int, n: int, coefficients: str | int, budget: int, cache: Path | None) -> dict:
    """Betti numbers of ``DF_n`` on a ``w x h`` board (with ``w >= h``), cached by content hash.

    Returns ``{"betti": [...], "cells": int, "seconds": float}`` or
    ``{"budget_exceeded": true, ...}``.
    """
    key = cache_key(w, h, n, coefficients)
    path = cache / f"{key}.json" if cache else None
    if path is not None and path.exists():
        return json.loads(path.read_text())
    t0 = time.perf_counter()
    try:
        c = config_complex(w, h, n, cap=budget)
        cells = sum(c.sizes)
        if cells > budget:
            raise BudgetExceeded(f"{cells} cells exceed the budget {budget}")
        betti = [s.betti for s in betti_numbers(c.chain_complex(), coefficients)]
        result = {"w": w, "h": h, "n": n, "betti": betti, "cells": cells, "seconds": round(time.perf_counter() - t0, 3)}
    except BudgetExceeded as e:
        log.info("w=%d h=%d n=%d over budget: %s", w, h, n, e)
        result = {"w": w, "h": h, "n": n, "budget_exceeded": True, "cells": None, "seconds": None}
    if path is not None:
        _write_atomic(path, json.dumps(result, sort_keys=True))
    return result


def _job(args):
    return board_homology(*args)


def stability_sweep(spec: SweepSpec) -> list[SweepRow]:
    """One row per ``(n, w, h, k)``; boards are looked up with the longer side first."""
    cache = _prepare_cache(spec.cache_dir)
    boards = sorted(
        {(max(w, h), min(w, h), n) for n in spec.n_values for w in range(spec.w_min, spec.w_max + 1) for h in range(spec.h_min, spec.h_max + 1)}
    )
    args = [(w, h, n, spec.coefficients, spec.budget, cache) for w, h, n in boards]
    if spec.jobs > 1:
        with ProcessPoolExecutor(spec.jobs) as pool:
            results = list(pool.map(_job, args))
    else:
        results = [_job(a) for a in args]
    table = {b: r for b, r in zip(boards, results)}
    rows = []
    for n in sorted(spec.n_values):
        for w in range(spec.w_min, spec.w_max + 1):
            for h in range(spec.h_min, spec.h_max + 1):
                res = table[(max(w, h), min(w, h), n)]
                for k in range(spec.k_max + 1):
                    point = betti_fn(n, k)
                    if res.get("budget_exceeded"):
                        square: int | str = BUDGET_EXCEEDED
                        agrees = None
                    else:
                        betti = res["betti"]
                        square = betti[k] if k < len(betti) else 0
                        agrees = square == point
                    rows.append(
                        SweepRow(n, w, h, k, square, point, in_stable_range(n, w, h, k), in_k1_range(n, w, h, k), agrees, res["cells"], res["seconds"])
                    )
    return rows


def violations(rows: Iterable[SweepRow]) -> list[SweepRow]:
    """Completed rows inside a stability range whose Betti numbers disagree."""
    return [r for r in rows if (r.stable_range or r.k1_range) and r.agrees is False]


def exit_code(rows: Sequence[SweepRow]) -> int:
    """0 when every check passes, 2 on a stable-range disagreement, 3 when only the budget failed."""
    if violations(rows):
        return 2
    if any(r.agrees is None for r in rows):
        return 3
    return 0


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def emit_table(rows: Sequence[SweepRow], fmt: str = "csv", out: str | os.PathLike | IO[str] | None = None) -> str:
    """Render rows as CSV or JSON (sorted by ``n, w, h, k``) and write them to ``out`` if given."""
    rows = sorted(rows, key=lambda r: (r.n, r.w, r.h, r.k))
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for r in rows:
            d = r.as_dict()
            writer.writerow([_fmt(d[c]) for c in COLUMNS])
        text = buf.getvalue()
    elif fmt == "json":
        text = json.dumps([r.as_dict() for r in rows], indent=2) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if out is None:
        return text
    if hasattr(out, "write"):
        out.write(text)
    else:
        path = Path(out)
        try:
            path.write_text(text)
        except OSError as e:
            raise OSError(f"cannot write table to {path}: {e}") from e
    return text


def parse_table(text: str) -> list[SweepRow]:
    """Read back a CSV produced by :func:`emit_table`."""
    out = []
    for d in csv.DictReader(io.StringIO(text)):
        def opt(v, kind):
            return None if v == "" else kind(v)

        sq = d["betti_square"]
        out.append(
            SweepRow(
                int(d["n"]),
                int(d["w"]),
                int(d["h"]),
                int(d["k"]),
                sq if sq == BUDGET_EXCEEDED else int(sq),
                int(d["betti_point"]),
                d["stable_range"] == "true",
                d["k1_range"] == "true",
                opt(d["agrees"], lambda v: v == "true"),
                opt(d["cells"], int),
                opt(d["seconds"], float),
            )
        )
    return out
