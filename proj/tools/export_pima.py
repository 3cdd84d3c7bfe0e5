#!/usr/bin/env python3
"""Exports the Pima Indians diabetes records (MASS Pima.tr2 + Pima.te) to CSV.

Requires the `rdatasets` package. Adds an `age_band` column used as the
fairness group, since the cohort is single-sex.
"""

import argparse

import rdatasets


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output", default="data/pima_diabetes.csv")
    args = parser.parse_args()

    frames = [rdatasets.data("MASS", name) for name in ("Pima.tr2", "Pima.te")]
    rows = []
    for frame in frames:
        frame = frame.drop(columns=[c for c in frame.columns if c.startswith("Unnamed")])
        rows.append(frame)
    import pandas as pd

    data = pd.concat(rows, ignore_index=True)
    data["age_band"] = ["under35" if a < 35 else "35plus" for a in data["age"]]
    cols = ["npreg", "glu", "bp", "skin", "bmi", "ped", "age", "age_band", "type"]
    data[cols].to_csv(args.output, index=False, na_rep="NA", float_format="%.6g")


if __name__ == "__main__":
    main()
