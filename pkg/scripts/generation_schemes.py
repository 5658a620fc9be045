"""Fidelity and success probability of the two EGCS(n=1) generation schemes."""
import argparse

from egcs.optics import bs_scheme_pipeline, generate_egcs_n1


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--alphas", type=lambda s: [float(v) for v in s.split(",")], default=[0, 0.5, 1, 2])
    args = p.parse_args()
    print(f"{'alpha':>6} {'PBS F':>8} {'P_succ':>8} {'field F':>8} {'BS F':>8} {'BS op F':>8}")
    for a in args.alphas:
        pbs = generate_egcs_n1(a)
        bs = bs_scheme_pipeline(a)
        print(f"{a:6.2f} {pbs.fidelity_to_target:8.4f} {pbs.success_probability:8.4f} "
              f"{pbs.diagnostics['field_input_fidelity']:8.4f} {bs.fidelity_to_target:8.4f} "
              f"{bs.diagnostics['operator_form_fidelity']:8.4f}")


if __name__ == "__main__":
    main()
