"""Wall-clock comparison of the Lyapunov step against the flattened banded and dense solves.

    python scripts/benchmark_paths.py --J 10 20 40 --steps 100
"""
import argparse

from sylvbq.exceptions import BlowUpError
from sylvbq.harness import compare_baseline


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--J", type=int, nargs="+", default=[10, 20, 40])
    ap.add_argument("--steps", type=int, default=100)
    ap.add_argument("--case", default="example1")
    ap.add_argument("--table-step", action="store_true", help="use l = 1/(10J) instead of l = h^3")
    args = ap.parse_args()
    print("J,l,steps,lyapunov_s,banded_s,dense_s,dense_speedup,max_divergence")
    for J in args.J:
        h = 2.0 / J
        l = 1 / (10 * J) if args.table_step else h ** 3
        try:
            rec = compare_baseline(args.case, J, l, args.steps)
        except BlowUpError as exc:
            print(f"{J},{l:.6e},{args.steps},blow-up at step {exc.step}")
            continue
        t = rec.times_s
        print(f"{J},{l:.6e},{args.steps},{t['lyapunov']:.4f},{t['banded']:.4f},{t['dense']:.4f},"
              f"{rec.speedups['dense/lyapunov']:.1f},{max(rec.divergence.values()):.2e}")


if __name__ == "__main__":
    main()
