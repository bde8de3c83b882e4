"""Run both benchmark ladders and write one CSV per (case, source).

    python scripts/reproduce_tables.py --out results/
"""
import argparse
from pathlib import Path

from sylvbq.harness import TABLE_LADDER, HarnessConfig, sweep


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results")
    ap.add_argument("--sources", default="printed,manufactured")
    ap.add_argument("--init-mode", default="exact", choices=("exact", "taylor"))
    ap.add_argument("--q", type=float, default=0.01)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for case in ("example1", "example2"):
        for source in args.sources.split(","):
            cfg = HarnessConfig(case=case, source=source, init_mode=args.init_mode, q=args.q)
            res = sweep(case, TABLE_LADDER, cfg, workers=args.workers)
            path = out / f"{case}_{source}_q{args.q:g}.csv"
            path.write_text(res.to_csv())
            print(f"{path}:")
            for r in res.rows:
                er = "-" if r.Er is None else f"{r.Er:.3e}"
                print(f"  J={r.J:3d} l={r.l:.5f} Er={er:>10} {r.status}")


if __name__ == "__main__":
    main()
