"""Calibrates the constant C in

    N^2 * KL(f || q_N) <= 1/2 * sum 1/f(s) + (C / N) * sum 1/f(s)^2

over the fixed samples and the three deadline-driven allocators, for
N in (Q, 10Q].  Tables come from ansctl; the divergence is evaluated here
with mpmath at 50 digits so the sweep does not depend on the C++ code.

usage: python3 kl_constant.py <ansctl> <output.json>
"""
import json
import subprocess
import sys

from mpmath import mp, mpf, log

mp.dps = 50

SAMPLES = ["linear", "fibonacci", "uniform-table2", "zipf-table2", "alphabet"]
ALGORITHMS = ["edf", "shifted", "greedy"]
MARGIN = mpf("1.25")


def table(ansctl, algo, sample):
    out = subprocess.run([ansctl, "gen-table", "--algo", algo, "--sample", sample],
                         check=True, capture_output=True, text=True).stdout
    j = json.loads(out)
    return j["allocation"], dict(zip(j["symbols"], j["counts"]))


def required_c(alloc, counts):
    q = len(alloc)
    f = {s: mpf(c) / q for s, c in counts.items()}
    lead = sum(1 / v for v in f.values()) / 2
    sq = sum(1 / (v * v) for v in f.values())
    seen = {s: 0 for s in counts}
    worst = mpf("-inf")
    for n in range(1, 10 * q + 1):
        seen[alloc[(n - 1) % q]] += 1
        if n <= q:
            continue
        kl = sum(f[s] * log(n * f[s] / seen[s]) for s in counts)
        worst = max(worst, (n * n * kl - lead) * n / sq)
    return worst


def main():
    ansctl, output = sys.argv[1], sys.argv[2]
    per_case = {}
    for sample in SAMPLES:
        for algo in ALGORITHMS:
            alloc, counts = table(ansctl, algo, sample)
            per_case[f"{sample}/{algo}"] = required_c(alloc, counts)
    worst = max(per_case.values())
    doc = {
        "description": "C such that N^2 KL <= sum(1/f)/2 + C/N sum(1/f^2) for N in (Q, 10Q]",
        "required": float(worst),
        "C": float(max(worst, mpf(0)) * MARGIN),
        "margin": float(MARGIN),
        "cases": {k: float(v) for k, v in sorted(per_case.items())},
    }
    with open(output, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


if __name__ == "__main__":
    main()
