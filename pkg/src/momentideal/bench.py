"""Scaling benchmark: border bases of the vanishing ideal of random points.

For each (n, r) the harness plants r distinct random points over the prime
field, builds the weight-1 moment sequence on the smallest certifying
simplex, and wall-clocks the border-basis computation (median of the
repetitions).  Every timed run must come back certified with rank r.
"""

from __future__ import annotations

import gc
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from math import comb

from .border import border_basis
from .decomp import Decomposition
from .fields import DEFAULT_PRIME, FieldSpec
from .moments import MomentSequence, moments_of_decomposition
from .polys import simplex


class BenchFailure(Exception):
    pass


@dataclass
class BenchConfig:
    field: FieldSpec = dc_field(default_factory=lambda: FieldSpec.prime(DEFAULT_PRIME))
    nvars: tuple = (2,)
    points: tuple = (50, 100, 200)
    degree: int | None = None  # None: smallest D whose simplex certifies at rank r
    seed: int = 0
    repetitions: int = 3
    parallel_trials: bool = False

    def __post_init__(self):
        if min(self.points) < 1 or self.repetitions < 1:
            raise ValueError("need points >= 1 and repetitions >= 1")


@dataclass
class BenchRow:
    nvars: int
    r: int
    degree: int
    moments: int
    seconds: float
    certified: bool


CSV_HEADER = "n,r,D,s,seconds,certified"


def rows_to_csv(rows) -> str:
    lines = [CSV_HEADER]
    for row in rows:
        lines.append(
            f"{row.nvars},{row.r},{row.degree},{row.moments},{row.seconds:.6f},{str(row.certified).lower()}"
        )
    return "\n".join(lines) + "\n"


def sample_points(n: int, r: int, field: FieldSpec, seed) -> list:
    """r distinct uniform points in F_p^n, by rejection."""
    rng = random.Random(f"{seed}:{n}:{r}")
    seen = set()
    while len(seen) < r:
        seen.add(tuple(rng.randrange(field.p) for _ in range(n)))
    return sorted(seen)


def _lower_degree_bound(n: int, r: int) -> int:
    k = 0
    while comb(k + n, n) < r:
        k += 1
    return max(2, 2 * k)


def planted_sequence(points, field: FieldSpec, degree: int) -> MomentSequence:
    n = len(points[0])
    dec = Decomposition(n, field, [(field.one, pt) for pt in points])
    return moments_of_decomposition(dec, simplex(n, degree))


def minimal_certifying_degree(points, field: FieldSpec, max_extra: int = 12):
    """Smallest simplex degree whose run certifies with the planted rank."""
    n, r = len(points[0]), len(points)
    start = _lower_degree_bound(n, r)
    for degree in range(start, start + max_extra + 1):
        sigma = planted_sequence(points, field, degree)
        res = border_basis(sigma, compute_q=False)
        if res.certified and res.r == r:
            return degree, sigma
    raise BenchFailure(f"no certifying degree for r={r}, n={n} within {start}..{start + max_extra}")


def run_bench(config: BenchConfig):
    """Run every (n, r) cell; returns BenchRow per cell.

    Timed repetitions always run sequentially.  With parallel_trials an
    extra validation pass per cell runs in a thread pool, outside timing.
    """
    rows = []
    validations = []
    for n in config.nvars:
        for r in config.points:
            pts = sample_points(n, r, config.field, config.seed)
            if config.degree is not None:
                degree = config.degree
                sigma = planted_sequence(pts, config.field, degree)
            else:
                degree, sigma = minimal_certifying_degree(pts, config.field)
            border_basis(sigma, compute_q=False)  # warm-up, untimed
            times = []
            res = None
            gc_was_on = gc.isenabled()
            gc.disable()
            try:
                for _ in range(config.repetitions):
                    # q is optional in the algorithm and not needed to
                    # certify; the timed product is the relations, the bases
                    # b/c and the certification
                    t0 = time.perf_counter()
                    res = border_basis(sigma, compute_q=False)
                    times.append(time.perf_counter() - t0)
            finally:
                if gc_was_on:
                    gc.enable()
            if not res.certified:
                raise BenchFailure(f"uncertified run at n={n}, r={r}, D={degree}")
            if res.r != r:
                raise BenchFailure(f"rank {res.r} != {r} at n={n}, D={degree}")
            times.sort()
            median = times[len(times) // 2]
            rows.append(BenchRow(n, r, degree, len(sigma.values), median, res.certified))
            if config.parallel_trials:
                validations.append(sigma)
    if validations:
        with ThreadPoolExecutor() as pool:
            for res in pool.map(border_basis, validations):
                if not res.certified:
                    raise BenchFailure("uncertified validation run")
    return rows
