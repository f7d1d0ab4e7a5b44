"""Run the acceptance suite and print one line per criterion.

    python scripts/run_acceptance.py [--suite all] [--seed 0xB45E]
"""
import argparse
import sys

from torsionforge.acceptance import SUITES, run_suite
from torsionforge.config import SuiteConfig
from torsionforge.corpus import corpus_seed

ap = argparse.ArgumentParser()
ap.add_argument("--suite", choices=sorted(SUITES), default="all")
ap.add_argument("--seed", type=lambda x: int(x, 0), default=None)
args = ap.parse_args()

cfg = SuiteConfig(seed=corpus_seed(args.seed))
results = run_suite(args.suite, cfg)
for r in results:
    print(r.line())
failed = [r.number for r in results if not r.passed]
print(f"{len(results) - len(failed)}/{len(results)} criteria pass (seed {cfg.seed:#x})")
sys.exit(1 if failed else 0)
