"""Split SL2 family: c(delta) / (p + 1) for each norm type, written as TSV.

    python scripts/run_sweep.py --primes 3,5,7,11,13 --out sweep.tsv
"""
import argparse

from torsionforge.basechange import c_ratio_sweep, sweep_tsv

ap = argparse.ArgumentParser()
ap.add_argument("--primes", default="3,5,7,11,13")
ap.add_argument("--out", default=None)
args = ap.parse_args()

rows = c_ratio_sweep(tuple(int(p) for p in args.primes.split(",")))
text = sweep_tsv(rows)
if args.out:
    with open(args.out, "w") as fh:
        fh.write(text)
print(text, end="")
# the largest c over non-trivial norms bounds the whole family
worst = max(r.c_coset_pairs for r in rows if r.kind != "trivial")
print(f"# max c over non-trivial norms: {worst}")
