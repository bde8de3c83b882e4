"""Small-data boundedness probe over a range of initial sizes, plus the first-step discriminants.

    python scripts/stability_probe.py --steps 200
"""
import argparse

from sylvbq.diagnostics import discriminant_diagnostics, stability_probe


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--J", type=int, default=10)
    ap.add_argument("--l", type=float, default=1 / 100)
    ap.add_argument("--steps", type=int, default=200)
    ap.add_argument("--epsilon", type=float, default=1.0)
    args = ap.parse_args()
    print("eta,max_norm,bounded,blow_up_step,first_exceed_step")
    for eta in (1e-4, 1e-3, 2e-3, 1e-2, 1e-1, 1.0):
        r = stability_probe(eta, args.steps, args.J, args.l, args.epsilon)
        print(f"{eta:.1e},{r.max_norm:.6e},{r.bounded},{r.blow_up_step},{r.first_exceed_step}")
    d = discriminant_diagnostics(args.l, 2.0 / args.J, 2.0, args.epsilon)
    print(f"\nDelta1={d.Delta1:.6f} eta1={d.eta1:.6f} Delta2={d.Delta2:.6e} eta1'={d.eta1_prime}")
    print(f"Delta2 leading={d.Delta2_leading:.6e} q-free form={d.Delta2_asymptotic:.6e} "
          f"printed={d.Delta2_printed:.6e}")


if __name__ == "__main__":
    main()
