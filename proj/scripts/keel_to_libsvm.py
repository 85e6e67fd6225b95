#!/usr/bin/env python3
"""Convert a KEEL .dat file (numeric attributes, nominal class last) to LIBSVM text.

Usage: keel_to_libsvm.py INPUT.dat OUTPUT --positive-label NAME [--positive-as -1]

The class named by --positive-label is written with the label given by
--positive-as (default +1); every other class gets the opposite sign.
Feature values are written with six decimals, zeros included, 1-based indices.
"""
import argparse


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("input")
    ap.add_argument("output")
    ap.add_argument("--positive-label", required=True)
    ap.add_argument("--positive-as", default="+1", choices=["+1", "-1"])
    args = ap.parse_args()
    neg_as = "-1" if args.positive_as == "+1" else "+1"

    rows = []
    with open(args.input) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("@"):
                continue
            *feats, cls = [t.strip() for t in line.split(",")]
            label = args.positive_as if cls == args.positive_label else neg_as
            body = " ".join(f"{k}:{float(v):.6f}" for k, v in enumerate(feats, start=1))
            rows.append(f"{label} {body}")
    with open(args.output, "w") as out:
        out.write("\n".join(rows) + "\n")


if __name__ == "__main__":
    main()
