#!/usr/bin/env python3
# Copyright 2026 The CADP Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Plots test accuracy against epsilon from a sweep's report.csv."""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("report")
    parser.add_argument("--out", default="accuracy.png")
    args = parser.parse_args()

    df = pd.read_csv(args.report)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for method, rows in df[df.method != "original"].groupby("method"):
        stats = rows.groupby("epsilon").test_acc_on_original.agg(["mean", "std"])
        ax.errorbar(stats.index, stats["mean"], yerr=stats["std"].fillna(0), marker="o",
                    capsize=3, label=method)
    original = df[df.method == "original"].test_acc_on_original
    if len(original):
        ax.axhline(original.mean(), color="gray", linestyle="--", label="original")
    ax.set_xscale("log")
    ax.set_xlabel("epsilon")
    ax.set_ylabel("test accuracy (original data)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
