"""Device population and named random streams."""
from __future__ import annotations

import hashlib
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .config import ScenarioConfig

STRICT = "strict"
RELAXED = "relaxed"


def derive_stream(seed: int, label: str) -> np.random.Generator:
    """Return an independent generator for the process named ``label``.

    The label is hashed into the seed sequence's spawn key, so streams for
    different labels (or seeds) never share state and each is reproducible.
    """
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    key = tuple(int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=key)))


@dataclass(frozen=True)
class MtdProfile:
    id: int
    position: tuple[float, float]
    max_delay_cycles: int
    min_rate_bps: float
    qos_class: str


class Population(Sequence):
    """Static device records, stored column-wise for vectorized access.

    Indexing yields :class:`MtdProfile` objects; the array attributes
    (``positions``, ``max_delay``, ``min_rate``, ``strict``) are read-only.
    """

    def __init__(self, positions, max_delay, min_rate, strict, bs_position):
        self.positions = _frozen(np.asarray(positions, dtype=float))
        self.max_delay = _frozen(np.asarray(max_delay, dtype=np.int64))
        self.min_rate = _frozen(np.asarray(min_rate, dtype=float))
        self.strict = _frozen(np.asarray(strict, dtype=bool))
        self.bs_position = np.asarray(bs_position, dtype=float)
        self.bs_distance = _frozen(np.hypot(*(self.positions - self.bs_position).T))

    def __len__(self):
        return len(self.max_delay)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        i = range(len(self))[i]
        return MtdProfile(
            id=i,
            position=(float(self.positions[i, 0]), float(self.positions[i, 1])),
            max_delay_cycles=int(self.max_delay[i]),
            min_rate_bps=float(self.min_rate[i]),
            qos_class=STRICT if self.strict[i] else RELAXED,
        )

    def __eq__(self, other):
        if not isinstance(other, Population):
            return NotImplemented
        return (
            np.array_equal(self.positions, other.positions)
            and np.array_equal(self.max_delay, other.max_delay)
            and np.array_equal(self.min_rate, other.min_rate)
            and np.array_equal(self.strict, other.strict)
        )

    __hash__ = None


def _frozen(a):
    a.setflags(write=False)
    return a


def build_population(cfg: ScenarioConfig, seed: int | None = None) -> Population:
    """Place N devices uniformly in the square; the first ceil(N/2) are strict."""
    cfg.validate()
    seed = cfg.rng_seed if seed is None else seed
    rng = derive_stream(seed, "population")
    n = cfg.n_devices
    side = cfg.area_side_m
    positions = rng.uniform(0.0, side, size=(n, 2))
    n_strict = (n + 1) // 2
    strict = np.arange(n) < n_strict
    s_lo, s_hi = cfg.strict_delay_range
    r_lo, r_hi = cfg.relaxed_delay_range
    max_delay = np.where(
        strict,
        rng.integers(s_lo, s_hi, size=n, endpoint=True),
        rng.integers(r_lo, r_hi, size=n, endpoint=True),
    )
    min_rate = np.full(n, float(cfg.min_rate_bps))
    return Population(positions, max_delay, min_rate, strict, bs_position=(side / 2, side / 2))
