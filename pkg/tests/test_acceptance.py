"""Acceptance criteria 1-10.

Each test prints one ``criterion k: PASS|FAIL ...`` line.  Run the file
directly (``python3 tests/test_acceptance.py``) for just the summary.
"""

import math
import random
import sys
import time
from collections import Counter
from functools import lru_cache

import numpy as np
import pytest

from fltrees.approx import (
    APPROX_FACTOR,
    approximate_rearrangement,
    family_partition,
    migrations_graph,
    migrations_matching,
    pair_partition,
)
from fltrees.forest import Cut, LabeledForest, anchor, apply_op, apply_script, permute, similar
from fltrees.isomorphism import isomorphic
from fltrees.matching import (
    BipartiteGraph,
    WeightedBipartiteGraph,
    assignment_mwm,
    max_weight_matching,
    max_weight_matching_oracle,
)
from fltrees.permdist import gamma_baseline, gamma_fast
from fltrees.tools import (
    PERM_ORACLE_MAX_N,
    all_trees,
    degree_reduce,
    matching_size,
    matching_to_trees,
    oracle_general_matching,
    oracle_perm_distance,
    oracle_rearrangement,
    oracle_tree_rearrangement,
    random_forest,
    random_permutation,
    random_relabel,
    random_tree,
)


def report(k: int, ok: bool, detail: str) -> None:
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'} {detail}"
    capman = _capture_manager[0]
    if capman is not None:
        with capman.global_and_fixture_disabled():
            print("\n" + line, flush=True)
    else:
        print(line, flush=True)


_capture_manager = [None]


@pytest.fixture(autouse=True)
def _uncaptured(request):
    _capture_manager[0] = request.config.pluginmanager.getplugin("capturemanager")
    yield
    _capture_manager[0] = None


def _iso_pair(rng, n, k=None):
    t = random_tree(n, rng)
    return t, random_relabel(t, rng.randint(0, n) if k is None else k, rng)


# --- 1 ----------------------------------------------------------------------


def test_criterion_1_oracle_equivalence():
    rng = random.Random(1)
    start = time.perf_counter()
    bad = 0
    for _ in range(2000):
        n = rng.randint(1, 8)
        t1, t2 = _iso_pair(rng, n)
        fast = gamma_fast(t1, t2).gamma
        base = gamma_baseline(t1, t2).root_gamma
        ref = n - oracle_perm_distance(t1, t2)
        bad += not (fast == base == ref)
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < 30
    report(1, ok, f"2000 pairs n<=8, {bad} disagreements, {elapsed:.1f}s (limit 30s)")
    assert ok


# --- 2 and 3 ----------------------------------------------------------------


def _full_graph_mwm(t1, t2, base, u, v):
    """MWM of G(u, v) over every same-shape child pair, weights from the baseline table."""
    ch1, ch2 = t1.children(), t2.children()
    id1, id2 = base.ids.ids1, base.ids.ids2
    edges = []
    for z in ch1[u]:
        for w in ch2[v]:
            if id1[z] == id2[w]:
                g = base.table.get((z, w), 0)
                if g:
                    edges.append((z, w, g))
    return assignment_mwm(edges)[0]


def test_criterion_2_and_3_baseline_at_scale():
    rng = random.Random(2)
    start = time.perf_counter()
    bad = 0
    graphs = bad3 = 0
    check3 = 0.0
    for _ in range(300):
        n = rng.randint(1, 500)
        t1, t2 = _iso_pair(rng, n)
        res = gamma_fast(t1, t2, keep_graphs=True)
        base = gamma_baseline(t1, t2)
        bad += res.gamma != base.root_gamma
        t3 = time.perf_counter()
        for g in res.graphs:
            graphs += 1
            split = g.without_special
            if g.special is not None:
                split = max(split, g.without_heavy + g.special_weight)
            direct = _full_graph_mwm(t1, t2, base, g.u, g.v)
            bad3 += split != direct
        check3 += time.perf_counter() - t3
    elapsed = time.perf_counter() - start - check3
    ok2 = bad == 0 and elapsed < 120
    ok3 = bad3 == 0 and graphs > 0
    report(2, ok2, f"300 pairs n<=500, {bad} disagreements, {elapsed:.1f}s (limit 120s)")
    report(3, ok3, f"{graphs} type-1/2 graphs, {bad3} where max(G', G''+gamma) != oracle MWM(G)")
    assert ok2 and ok3


# --- 4 ----------------------------------------------------------------------


def test_criterion_4_weight_bound_and_scaling():
    rng = random.Random(4)
    ratios = []
    over = 0
    for n in [10, 100, 1000, 5000, 20000]:
        for _ in range(3):
            t1, t2 = _iso_pair(rng, n, n // 10)
            res = gamma_fast(t1, t2)
            over += res.nonspecial_weight > res.weight_bound()
            ratios.append(res.nonspecial_weight / (n * math.ceil(math.log2(n))))
    times = {}
    for n in [1000, 10000, 100000]:
        t1, t2 = _iso_pair(rng, n, n // 10)
        best = None
        for _ in range(3 if n < 100000 else 1):
            start = time.perf_counter()
            res = gamma_fast(t1, t2)
            took = time.perf_counter() - start
            best = took if best is None else min(best, took)
        times[n] = best
        over += res.nonspecial_weight > res.weight_bound()
        ratios.append(res.nonspecial_weight / (n * math.ceil(math.log2(n))))
    xs = np.log10(list(times))
    slope = float(np.polyfit(xs, np.log10(list(times.values())), 1)[0])
    ok = over == 0 and times[100000] <= 10 and slope <= 1.7
    report(
        4,
        ok,
        f"weight/(n ceil(log2 n)) max {max(ratios):.3f} (bound 2), {over} violations; "
        f"n=1e5 in {times[100000]:.2f}s (limit 10s); scaling exponent {slope:.2f} (limit 1.7)",
    )
    assert ok


# --- 5 ----------------------------------------------------------------------


def test_criterion_5_matching():
    rng = random.Random(5)
    bad = over = 0
    for _ in range(1000):
        nl, nr = rng.randint(0, 8), rng.randint(0, 8)
        p = rng.random()
        edges = [(l, r, rng.randint(1, 6)) for l in range(nl) for r in range(nr) if rng.random() < p]
        g = WeightedBipartiteGraph(range(nl), range(nr), edges)
        w, m = max_weight_matching(g)
        bad += w != max_weight_matching_oracle(g)[0] or not m.is_valid(g)
        over += m.instance_edges > g.total_weight
    ok = bad == 0 and over == 0
    report(5, ok, f"1000 graphs, {bad} weight mismatches, {over} accounting overruns")
    assert ok


# --- 6 ----------------------------------------------------------------------


def _random_bipartite(rng, max_side):
    nl, nr = rng.randint(1, max_side), rng.randint(1, max_side)
    p = rng.random()
    return BipartiteGraph(range(nl), range(nr), [(l, r) for l in range(nl) for r in range(nr) if rng.random() < p])


def test_criterion_6_reduction():
    rng = random.Random(6)
    offset_bad = 0
    for _ in range(500):
        g = _random_bipartite(rng, 7)
        g2, k = degree_reduce(g)
        offset_bad += matching_size(g2) - k != matching_size(g)

    # per edge count m of the reduced graph: matching size -> distances seen
    seen: dict = {}
    noniso = by_oracle = disagree = 0
    count = 0
    while count < 200:
        g = _random_bipartite(rng, 5)
        if not g.edges:
            continue
        count += 1
        g2, _ = degree_reduce(g)
        out = matching_to_trees(g2)
        if not isomorphic(out.t1, out.t2):
            noniso += 1
            continue
        mm = matching_size(g2)
        if out.n <= PERM_ORACLE_MAX_N:
            d = oracle_perm_distance(out.t1, out.t2)
            by_oracle += 1
        else:
            # exact, and checked against the oracle in criterion 1
            d = out.n - gamma_baseline(out.t1, out.t2).root_gamma
        disagree += d != out.n - gamma_fast(out.t1, out.t2).gamma
        seen.setdefault(out.m, {}).setdefault(mm, set()).add(d)

    # a single affine map per m: one distance per matching size, all collinear
    fits = {}
    affine_bad = 0
    for m, table in sorted(seen.items()):
        if any(len(ds) != 1 for ds in table.values()):
            affine_bad += 1
            continue
        pts = sorted((x, next(iter(ds))) for x, ds in table.items())
        if len(pts) == 1:
            alpha = -1  # unidentifiable from one point; use the derived slope
        else:
            (x0, y0), (x1, y1) = pts[0], pts[-1]
            alpha = (y1 - y0) / (x1 - x0)
        beta = pts[0][1] - alpha * pts[0][0]
        affine_bad += any(y != alpha * x + beta for x, y in pts)
        fits[m] = (alpha, beta)
    derived = all(a == -1 and b == 7 * m + 2 for m, (a, b) in fits.items())
    ok = offset_bad == 0 and noniso == 0 and affine_bad == 0 and disagree == 0 and derived
    sample = ", ".join(f"m={m}:({a:g},{b:g})" for m, (a, b) in list(fits.items())[:4])
    report(
        6,
        ok,
        f"{offset_bad}/500 offset failures; 200 reductions, {noniso} non-isomorphic, "
        f"{affine_bad} m-classes off a single affine map, {disagree} fast/reference mismatches, "
        f"{by_oracle} calibrated by brute force; fits d = alpha*mm + beta: {sample} ... "
        f"({'all' if derived else 'NOT all'} equal to alpha=-1, beta=7m+2)",
    )
    assert ok


# --- 7, 8, 9 ------------------------------------------------------------------


@lru_cache(maxsize=None)
def _dtilde(p1: tuple, p2: tuple) -> int:
    return oracle_rearrangement(LabeledForest(p1), LabeledForest(p2))


def _corpus():
    rng = random.Random(7)
    pairs = []
    for k in range(1000):
        # mostly the larger sizes; n <= 2 pairs are always at distance 0
        n = rng.randint(1, 7) if k % 5 == 0 else rng.randint(4, 7)
        # few roots, or most pairs would be similar outright
        f1 = random_forest(n, rng.randint(1, min(2, n)), rng)
        if k % 2:
            f2 = random_forest(n, rng.randint(1, min(2, n)), rng)
        else:
            # a nearby forest: a few cuts and a small relabelling
            f2 = f1
            for v in rng.sample(range(1, n + 1), rng.randint(0, min(1, n))):
                if f2.parent_of(v):
                    f2 = apply_op(f2, Cut(v, f2.parent_of(v)))
            f2 = permute(f2, random_permutation(n, rng.randint(0, min(3, n)), rng))
        pairs.append((f1, f2))
    return pairs


CORPUS = None


def _get_corpus():
    global CORPUS
    if CORPUS is None:
        CORPUS = [(f1, f2, *approximate_rearrangement(f1, f2)) for f1, f2 in _corpus()]
    return CORPUS


def test_criterion_7_approximation_soundness():
    bad_verify = bad_bounds = bad_zero = zeros = 0
    worst = 0.0
    for f1, f2, script, _ in _get_corpus():
        d = _dtilde(f1.parent, f2.parent)
        bad_verify += not similar(apply_script(f1, script), f2)
        bad_bounds += not (d <= script.size <= APPROX_FACTOR * d)
        bad_zero += (script.size == 0) != (d == 0)
        zeros += d == 0
        if d:
            worst = max(worst, script.size / d)
    ok = bad_verify == bad_bounds == bad_zero == 0
    report(
        7,
        ok,
        f"1000 forest pairs n<=7 ({zeros} at distance 0): {bad_verify} unverified, "
        f"{bad_bounds} outside [d, 224d], {bad_zero} zero mismatches; worst ratio {worst:.2f}",
    )
    assert ok


def test_criterion_8_per_step_bounds():
    viol = Counter()
    for f1, f2, _, trace in _get_corpus():
        a1, a2, a3, a4 = trace.alg
        g1, g2, g3 = trace.forests[1], trace.forests[2], trace.forests[3]
        p0, p3 = len(family_partition(f1, f2)), len(family_partition(g3, f2))
        viol["ALG1<=2|P|"] += a1 > 2 * p0
        viol["|P|<=2d"] += p0 > 2 * _dtilde(f1.parent, f2.parent)
        viol["ALG2<=2d(F1^1)"] += a2 > 2 * _dtilde(g1.parent, f2.parent)
        viol["ALG3<=2d(F1^2)"] += a3 > 2 * _dtilde(g2.parent, f2.parent)
        viol["|pi|<=2|P(F1^3)|"] += a4 > 2 * p3
        viol["2|P(F1^3)|<=4d(F1^3)"] += 2 * p3 > 4 * _dtilde(g3.parent, f2.parent)
    total = sum(viol.values())
    detail = ", ".join(f"{k} {v}" for k, v in viol.items())
    report(8, total == 0, f"violations: {detail}")
    assert total == 0


def test_criterion_9_lower_bound_witnesses():
    bad_mg = bad_max = 0
    for f1, f2, _, _ in _get_corpus():
        mg = migrations_graph(f1, f2)
        m = migrations_matching(f1, f2)
        bad_max += len(m) != oracle_general_matching(mg)
        bad_mg += len(m) > _dtilde(f1.parent, f2.parent)
    rng = random.Random(9)
    bad_pair = 0
    for _ in range(100000):
        items = [rng.randint(0, rng.randint(0, 6)) for _ in range(rng.randint(0, 12))]
        pairs, rest = pair_partition(items)
        want = min(len(items) - Counter(items).most_common(1)[0][1], len(items) // 2) if items else 0
        bad_pair += (
            len(pairs) != want
            or any(a == b for a, b in pairs)
            or Counter(x for p in pairs for x in p) + Counter(rest) != Counter(items)
        )
    ok = bad_mg == bad_max == bad_pair == 0
    report(
        9,
        ok,
        f"migrations matching > d in {bad_mg} pairs ({bad_max} not maximum); "
        f"pairing bound failed on {bad_pair}/100000 multisets",
    )
    assert ok


# --- 10 -----------------------------------------------------------------------


def test_criterion_10_anchoring_identity():
    bad = total = 0
    for n in range(1, 4):
        trees = list(all_trees(n))
        for t1 in trees:
            for t2 in trees:
                if t1.root != t2.root:
                    continue
                total += 1
                bad += oracle_rearrangement(anchor(t1), anchor(t2)) != oracle_tree_rearrangement(t1, t2)
    report(10, bad == 0, f"{total} same-root tree pairs n<=3, {bad} where anchored d~ != d")
    assert bad == 0


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
