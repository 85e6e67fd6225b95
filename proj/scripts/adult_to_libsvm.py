#!/usr/bin/env python3
"""Binary-encode the UCI adult census file into 123 indicator features (LIBSVM text).

Usage: adult_to_libsvm.py adult.data adult.names OUTPUT

Continuous columns are cut into quantile bins computed on the input file:
age, fnlwgt, education-num and hours-per-week get 5 bins, capital-gain and
capital-loss get 2 (zero / non-zero). Categorical columns get one indicator per
value in the order listed in adult.names; "?" leaves its group empty.
Rows earning >50K are labelled +1, the rest -1.
"""
import bisect
import statistics
import sys

COLUMNS = ["age", "workclass", "fnlwgt", "education", "education-num", "marital-status",
           "occupation", "relationship", "race", "sex", "capital-gain", "capital-loss",
           "hours-per-week", "native-country"]
QUINTILE = {"age", "fnlwgt", "education-num", "hours-per-week"}
ZERO_SPLIT = {"capital-gain", "capital-loss"}


def read_categories(names_path):
    cats = {}
    with open(names_path) as fh:
        for line in fh:
            if ":" not in line or line.startswith("|"):
                continue
            name, rest = line.split(":", 1)
            name = name.strip()
            rest = rest.strip().rstrip(".")
            if name in COLUMNS and rest != "continuous":
                cats[name] = [v.strip() for v in rest.split(",")]
    return cats


def main():
    data_path, names_path, out_path = sys.argv[1:4]
    cats = read_categories(names_path)
    records = []
    with open(data_path) as fh:
        for line in fh:
            parts = [p.strip() for p in line.strip().rstrip(".").split(",")]
            if len(parts) != len(COLUMNS) + 1:
                continue
            records.append(parts)

    cuts = {}
    for c, name in enumerate(COLUMNS):
        if name in QUINTILE:
            cuts[name] = statistics.quantiles([float(r[c]) for r in records], n=5, method="inclusive")

    widths = []
    for name in COLUMNS:
        widths.append(5 if name in QUINTILE else 2 if name in ZERO_SPLIT else len(cats[name]))
    offsets = [1]
    for w in widths[:-1]:
        offsets.append(offsets[-1] + w)

    with open(out_path, "w") as out:
        for r in records:
            idx = []
            for c, name in enumerate(COLUMNS):
                v = r[c]
                if name in QUINTILE:
                    idx.append(offsets[c] + bisect.bisect_left(cuts[name], float(v)))
                elif name in ZERO_SPLIT:
                    idx.append(offsets[c] + (1 if float(v) > 0 else 0))
                elif v != "?":
                    idx.append(offsets[c] + cats[name].index(v))
            label = "+1" if r[-1].startswith(">50K") else "-1"
            out.write(label + " " + " ".join(f"{i}:1" for i in sorted(idx)) + "\n")
    print(f"{len(records)} rows, {offsets[-1] + widths[-1] - 1} features", file=sys.stderr)


if __name__ == "__main__":
    main()
