#!/usr/bin/env python3
# Copyright 2026 The prtriage Authors.
# SPDX-License-Identifier: Apache-2.0
"""Independent reference values for the unit tests.

Run from the repository root:
  python3 tests/oracles/derive_values.py > tests/data/derived_values.json
Uses only the standard library; brute force wherever that is feasible.
"""
import itertools
import json
import math
import random


def nearest_rank(values, q):
    v = sorted(values)
    return v[max(1, math.ceil(q * len(v) - 1e-9)) - 1]


def auc_pairs(scores, labels):
    pos = [s for s, y in zip(scores, labels) if y]
    neg = [s for s, y in zip(scores, labels) if not y]
    total = 0.0
    for p in pos:
        for n in neg:
            total += 1.0 if p > n else 0.5 if p == n else 0.0
    return total / (len(pos) * len(neg))


def ap_fixed_order(labels_in_rank_order):
    hits, total = 0, 0.0
    for k, y in enumerate(labels_in_rank_order, start=1):
        if y:
            hits += 1
            total += hits / k
    return total / hits


def ap_tie_average(scores, labels):
    # Average of AP over every ordering of each tie group.
    groups = {}
    for s, y in zip(scores, labels):
        groups.setdefault(s, []).append(y)
    keys = sorted(groups, reverse=True)
    total, weight = 0.0, 0
    for combo in itertools.product(*[list(itertools.permutations(groups[k])) for k in keys]):
        order = [y for part in combo for y in part]
        total += ap_fixed_order(order)
        weight += 1
    return total / weight


def entropy_bits(changes):
    t = sum(changes)
    return -sum(c / t * math.log2(c / t) for c in changes if c > 0)


def main():
    out = {}
    out["change_entropy_10_20_70"] = entropy_bits([10, 20, 70])
    out["log1p_104"] = math.log1p(104)
    out["roc_auc_example"] = auc_pairs([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1])
    out["nearest_rank_0_9_q08"] = nearest_rank(list(range(10)), 0.8)
    out["nearest_rank_00_0_0_10_q08"] = nearest_rank([0, 0, 0, 0, 10], 0.8)
    out["strata_1_100"] = [nearest_rank(list(range(1, 101)), q) for q in (0.25, 0.5, 0.75)]
    out["pr_auc_single_positive_last_n7"] = ap_fixed_order([0] * 6 + [1])

    # Tie-averaged AP on small instances, exhaustive over tie permutations.
    rng = random.Random(20260117)
    cases = []
    for _ in range(40):
        n = rng.randint(2, 7)
        scores = [rng.choice([0.1, 0.2, 0.3]) for _ in range(n)]
        labels = [rng.randint(0, 1) for _ in range(n)]
        if sum(labels) == 0:
            labels[0] = 1
        entry = {"scores": scores, "labels": labels,
                 "pr_auc": ap_tie_average(scores, labels)}
        if 0 < sum(labels) < n:
            entry["roc_auc"] = auc_pairs(scores, labels)
        cases.append(entry)
    out["tie_cases"] = cases

    # Budget example: n=50, 10 positives, 5 of them inside the top 10.
    out["budget_recall_example"] = 5 / 10
    print(json.dumps(out, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
