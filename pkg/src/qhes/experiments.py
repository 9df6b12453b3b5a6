"""Experiment records and the two reference sweeps.

* ``fig3``: eigenvalue error of judge-driven bisection on the Ising chain,
  over physical size ``N`` and representation size ``R``.
* ``fig4``: eigenstate error of the selector on the same chain, over ``N``
  and counter size ``K`` with the largest coin count the counter holds,
  ``M = 2**(K-1)``.
"""

from __future__ import annotations

import csv
import io
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Sequence, TextIO

import numpy as np

from .dirac import CoinConfig
from .eigensolver import dichotomy_lowest, quantum_selector
from .errors import ConfigError
from .hamiltonian import ising_chain
from .heaviside import FilterConfig
from .reference import brute_force_eigs

CSV_COLUMNS = ("experiment", "N", "R_or_K", "Q", "W", "M", "seed", "E_c", "E_g", "error", "wall_time_ms", "shots")


@dataclass
class ExperimentRecord:
    experiment: str
    N: int
    R_or_K: int
    Q: int | None
    W: int | None
    M: int | None
    seed: int
    E_c: float | None
    E_g: float | None
    error: float | None
    wall_time_ms: float
    shots: int = 0

    def row(self, timing: bool = True) -> list[str]:
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "wall_time_ms" and not timing:
                v = 0.0
            out.append(format_value(v))
        return out

    def as_dict(self) -> dict:
        return asdict(self)


def format_value(v) -> str:
    """17 significant digits for floats, plain integers, empty for missing values."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def write_csv(records: Iterable[ExperimentRecord], stream: TextIO, timing: bool = True) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.row(timing))


def records_to_csv(records: Iterable[ExperimentRecord], timing: bool = True) -> str:
    buf = io.StringIO()
    write_csv(records, buf, timing)
    return buf.getvalue()


def read_csv(text: str) -> list[dict[str, str]]:
    rows = list(csv.DictReader(io.StringIO(text)))
    return rows


def fig3_cell(N: int, R: int, seed: int, shots: int = 0) -> ExperimentRecord:
    h = ising_chain(N)
    ref = brute_force_eigs(h)
    cfg = FilterConfig.default(N, R)
    t = time.perf_counter()
    trace = dichotomy_lowest(h, cfg, seed, shots=shots, reference=ref)
    ms = (time.perf_counter() - t) * 1e3
    return ExperimentRecord("fig3", N, R, cfg.Q, cfg.W, None, seed, trace.E_c, ref.ground, trace.eps_v, ms, shots)


def fig4_cell(N: int, K: int, seed: int, shots: int = 0) -> ExperimentRecord:
    h = ising_chain(N)
    ref = brute_force_eigs(h)
    coin = CoinConfig(2 ** (K - 1), K)
    t = time.perf_counter()
    res = quantum_selector(h, ref.ground, seed, coin=coin, reference=ref)
    ms = (time.perf_counter() - t) * 1e3
    return ExperimentRecord("fig4", N, K, None, None, coin.M, seed, ref.ground, ref.ground, res.eps_s, ms, shots)


_CELLS = {"fig3": fig3_cell, "fig4": fig4_cell}


def default_threads() -> int:
    env = os.environ.get("QHES_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_sweep(
    kind: str,
    Ns: Sequence[int],
    xs: Sequence[int],
    seeds: Sequence[int] = (0,),
    threads: int | None = None,
    shots: int = 0,
) -> list[ExperimentRecord]:
    """One record per ``(N, x, seed)``; output order is the grid order whatever the thread count."""
    if kind not in _CELLS:
        raise ConfigError(f"unknown sweep {kind!r}; choose from {sorted(_CELLS)}")
    cell = _CELLS[kind]
    grid = [(n, x, s) for n in Ns for x in xs for s in seeds]
    threads = threads or default_threads()
    if threads <= 1 or len(grid) <= 1:
        records = [cell(n, x, s, shots) for n, x, s in grid]
    else:
        # largest cells first so long runs do not trail at the end
        order = sorted(range(len(grid)), key=lambda i: (-grid[i][0], -grid[i][1]))
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = {i: pool.submit(cell, *grid[i], shots) for i in order}
            records = [futures[i].result() for i in range(len(grid))]
    return sorted(records, key=lambda r: (r.N, r.R_or_K, r.seed))


def parse_range(text: str) -> list[int]:
    """``"3..7"``, ``"2,3"``, ``"2,4..6"`` or ``""`` (empty)."""
    out: list[int] = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        try:
            if ".." in part:
                a, b = part.split("..", 1)
                out.extend(range(int(a), int(b) + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise ConfigError(f"bad range element {part!r} in {text!r}") from None
    return out


def log_slope(xs: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of ``ln(error)`` against ``x``."""
    return float(np.polyfit(np.asarray(xs, float), np.log(np.asarray(errors, float)), 1)[0])
