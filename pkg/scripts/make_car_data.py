#!/usr/bin/env python3
"""Reconstruct the car evaluation dataset as a full 6-attribute factorial.

The original data are a deterministic function of the six inputs, defined by
a small hierarchy of qualitative decision tables:

    car     = f(price, tech)
    price   = f(buying, maint)
    tech    = f(comfort, safety)
    comfort = f(doors, persons, lug_boot)

The published tables are not distributed with the CSV, so this script
searches for monotone tables that reproduce the known hard rules
(persons=2 -> unacc, safety=low -> unacc, buying=maint=vhigh -> unacc) and
the published class distribution (unacc 1210, acc 384, good 69, vgood 65)
exactly.  Intermediate concepts carry five qualitative levels; four turned
out to be too coarse to hit the distribution.  The annealing seed is fixed,
so the output is deterministic.  See README for the provenance caveats of
this reconstruction.
"""

import csv
import itertools
import math
import os
import random
import sys

BUYING = ["vhigh", "high", "med", "low"]      # index 0 = worst for the buyer
MAINT = ["vhigh", "high", "med", "low"]
DOORS = ["2", "3", "4", "5more"]
PERSONS = ["2", "4", "more"]
LUG = ["small", "med", "big"]
SAFETY = ["low", "med", "high"]
CLASSES = ["unacc", "acc", "good", "vgood"]
TARGET = [1210, 384, 69, 65]

# rows forced to unacc by the hard rules: persons=2 (576), safety=low with
# persons>2 (384), buying=maint=vhigh with both survivors (48)
FORCED_UNACC = 576 + 384 + 48

N_LEVELS = 5                                  # intermediate concept scales

# grid shapes: price over (buying, maint); comfort over (doors, persons>2,
# lug_boot); tech over (comfort, safety>low); car over (price, tech)
PRICE_DIMS = (4, 4)
COMFORT_DIMS = (4, 2, 3)
TECH_DIMS = (N_LEVELS, 2)
CAR_DIMS = (4, N_LEVELS)
VALUE_CAPS = (3, N_LEVELS - 1, N_LEVELS - 1, 3)


class Model:
    def __init__(self):
        self.price = {k: min(3, sum(k) // 2)
                      for k in itertools.product(*map(range, PRICE_DIMS))}
        self.comfort = {k: min(N_LEVELS - 1, (k[0] + 2 * k[1] + k[2]) // 2)
                        for k in itertools.product(*map(range, COMFORT_DIMS))}
        self.tech = {k: max(0, min(k[0], 2 * k[1]))
                     for k in itertools.product(*map(range, TECH_DIMS))}
        self.car = {k: min(3, min(k))
                    for k in itertools.product(*map(range, CAR_DIMS))}
        self.price[(0, 0)] = 0

    def counts(self):
        """Class counts over the full factorial, via level histograms."""
        n_b = [0] * 4
        for k, v in self.price.items():
            if k != (0, 0):
                n_b[v] += 1
        n_c = [0] * N_LEVELS
        for v in self.comfort.values():
            n_c[v] += 1
        n_t = [0] * N_LEVELS
        for (c, s), v in self.tech.items():
            n_t[v] += n_c[c]
        out = [0] * 4
        out[0] = FORCED_UNACC
        for (p, t), v in self.car.items():
            out[v] += n_b[p] * n_t[t]
        return out

    def classify(self, b, m, d, p, l, s):
        if p == 0 or s == 0 or (b == 0 and m == 0):
            return 0
        comfort = self.comfort[(d, p - 1, l)]
        tech = self.tech[(comfort, s - 1)]
        return self.car[(self.price[(b, m)], tech)]


def _monotone(table, key, dims):
    v = table[key]
    for axis in range(len(key)):
        down = list(key)
        down[axis] -= 1
        if down[axis] >= 0 and table[tuple(down)] > v:
            return False
        up = list(key)
        up[axis] += 1
        if up[axis] < dims[axis] and table[tuple(up)] < v:
            return False
    return True


def _distance(counts):
    return sum(abs(c - t) for c, t in zip(counts, TARGET))


def search(seed, iters=600_000):
    rng = random.Random(seed)
    model = Model()
    tables = [
        (model.price, PRICE_DIMS),
        (model.comfort, COMFORT_DIMS),
        (model.tech, TECH_DIMS),
        (model.car, CAR_DIMS),
    ]
    keys = [list(t) for t, _ in tables]
    cur = _distance(model.counts())
    temp = 30.0
    for _ in range(iters):
        which = rng.randrange(4)
        table, dims = tables[which]
        key = rng.choice(keys[which])
        if which == 0 and key == (0, 0):
            continue
        old = table[key]
        new = old + rng.choice((-1, 1))
        if not 0 <= new <= VALUE_CAPS[which]:
            continue
        table[key] = new
        if not _monotone(table, key, dims):
            table[key] = old
            continue
        d = _distance(model.counts())
        if d <= cur or rng.random() < math.exp(-(d - cur) / temp):
            cur = d
            if d == 0:
                return model
        else:
            table[key] = old
        temp = max(0.05, temp * 0.99999)
    return None


def write_csv(model, path):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["buying", "maint", "doors", "persons",
                    "lug_boot", "safety", "class"])
        for b, m, d, p, l, s in itertools.product(
                range(4), range(4), range(4), range(3), range(3), range(3)):
            w.writerow([BUYING[b], MAINT[m], DOORS[d], PERSONS[p],
                        LUG[l], SAFETY[s],
                        CLASSES[model.classify(b, m, d, p, l, s)]])


def main():
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 1
    model = search(seed)
    if model is None:
        print(f"seed {seed}: no exact-count model found", file=sys.stderr)
        return 1
    counts = [0] * 4
    for b, m, d, p, l, s in itertools.product(
            range(4), range(4), range(4), range(3), range(3), range(3)):
        counts[model.classify(b, m, d, p, l, s)] += 1
    print("class counts:", dict(zip(CLASSES, counts)))
    assert counts == TARGET
    out = os.path.join(os.path.dirname(__file__), "..", "data", "uci",
                       "car.csv")
    write_csv(model, os.path.normpath(out))
    print("wrote", os.path.normpath(out))
    return 0


if __name__ == "__main__":
    sys.exit(main())
