from __future__ import annotations

from dataclasses import dataclass, field

from .corpus import corpus_seed


@dataclass
class SuiteConfig:
    """Sizes and tolerances of the acceptance corpora."""

    seed: int = field(default_factory=corpus_seed)
    rt_count: int = 50
    scaling_count: int = 20
    max_rank: int = 5
    max_entry: int = 5
    tolerance: float = 1e-9
    involution_count: int = 20
    product_count: int = 10
    simplicial_random: int = 12
    sweep_primes: tuple = (3, 5, 7, 11, 13)
    ttf_count: int = 100
    time_limits: dict = field(default_factory=lambda: {1: 10.0, 9: 60.0, 12: 120.0})


@dataclass
class RunConfig:
    """Options shared by every CLI subcommand."""

    cache_dir: str = ".torsionforge-cache"
    use_cache: bool = True
    output: str | None = None
