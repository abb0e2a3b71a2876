"""Acceptance criteria 1-9, one test each.

Each test records a one-line verdict; the lines are printed in the
terminal summary (and immediately with ``-s``).
"""
import time

import numpy as np
import pytest

from coreep import ensembles
from coreep.cli import run
from coreep.continuity import rank_criterion
from coreep.errors import PremiseViolated
from coreep.fixtures import continuity_library, load_pair, load_sequence
from coreep.geninv import PowerLadder, _decompose, core_ep_inverse, drazin_inverse, moore_penrose
from coreep.linalg import spectral_norm
from coreep.perturbation import (
    PerturbationPair,
    bound_case1,
    bound_case2,
    bound_case3,
    classify,
    lower_bound_rank_jump,
)
from coreep.semistable import integral_core_ep_perturbed, integral_inverse_stable

RESULTS: dict[int, str] = {}


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def ensemble(count=200, seed=7):
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        k = 1 + i % 4
        n = int(rng.integers(k + 1, 13))
        out.append(ensembles.random_index_matrix(rng, n, k))
    return out


@pytest.fixture(scope="module")
def matrices():
    return ensemble()


def test_criterion_1_table():
    expected = [
        "Exact,0.0909,0.0099,0.0010,1.0000e-04",
        "(3.5),0.1647,0.0143,0.0014,1.4143e-04",
        "(3.12),0.7070,0.0705,0.0070,7.0710e-04",
    ]
    t0 = time.perf_counter()
    rep, text = run(["table1"])
    dt = time.perf_counter() - t0
    rows = text.strip().splitlines()[1:]
    cells_ok = sum(a == b for r, e in zip(rows, expected) for a, b in zip(r.split(",")[1:], e.split(",")[1:]))
    ok = rep.exit_code == 0 and rows == expected and dt < 1.0
    record(1, ok, f"{cells_ok}/12 cells match, {dt:.3f} s")


def test_criterion_2_defining_equations(matrices):
    t0 = time.perf_counter()
    worst_core = worst_mp = 0.0
    for c in matrices:
        a, k = c.A, c.k
        na = spectral_norm(a)
        res = core_ep_inverse(a)
        assert res.k == k
        worst_core = max(worst_core, res.max_residual() / (1 + na) ** (k + 1))
        worst_mp = max(worst_mp, moore_penrose(a).max_residual() / (1 + na))
    dt = time.perf_counter() - t0
    ok = worst_core <= 1e-9 and worst_mp <= 1e-10 and dt < 30
    record(2, ok, f"max scaled core-EP residual {worst_core:.2e} (<= 1e-9), "
                  f"Penrose {worst_mp:.2e} (<= 1e-10), {dt:.2f} s")


def test_criterion_3_identities(matrices):
    worst = 0.0
    for c in matrices:
        lad = PowerLadder(c.A)
        k = lad.index
        d = drazin_inverse(c.A).X
        routes = [
            d @ lad.power(k) @ lad.pinv(k),
            d @ lad.power(k + 1) @ lad.pinv(k + 1),
            lad.power(k) @ lad.pinv(k + 1),
            _decompose(lad).core_ep_inverse(),
        ]
        scale = spectral_norm(routes[2])
        for i in range(4):
            for j in range(i + 1, 4):
                worst = max(worst, spectral_norm(routes[i] - routes[j]) / scale)
    record(3, worst <= 1e-8, f"max pairwise route gap / ||A^c|| = {worst:.2e} (<= 1e-8)")


def test_criterion_4_closed_form():
    rng = np.random.default_rng(44)
    worst_defect = 0.0
    violations = 0
    for i in range(50):
        k = 1 + i % 4
        n = int(rng.integers(k + 1, 11))
        c, e = ensembles.case1_pair(rng, n, k, strength=float(rng.uniform(0.05, 0.5)))
        pp = PerturbationPair(c.A, e)
        assert pp.profile.case1 and pp.norm_xe <= 0.5 + 1e-12
        b32, _ = bound_case1(pp)
        worst_defect = max(worst_defect, b32.extras["closed_form_defect"] / pp.norm_x)
        violations += b32.exact > b32.value
    ok = worst_defect <= 1e-9 and violations == 0
    record(4, ok, f"max closed-form defect / ||A^c|| = {worst_defect:.2e}, "
                  f"{violations}/50 bound violations")


def test_criterion_5_bound_domination():
    rng = np.random.default_rng(55)
    v35 = v37 = v312 = 0
    n37 = 0
    margin312 = np.inf
    for i in range(50):
        k = 1 + i % 4
        n = int(rng.integers(k + 2, 11))
        c, e = ensembles.case2_pair(rng, n, k, strength=float(rng.uniform(0.01, 0.5)))
        pp = PerturbationPair(c.A, e)
        b35, _ = bound_case2(pp)
        v35 += b35.exact > b35.value + 1e-10
    smallest = 1.0
    for i in range(50):
        k = 1 + i % 4
        n = int(rng.integers(k + 2, 11))
        c, build = ensembles.case3_path(rng, n, k)
        unit = spectral_norm(build(1e-6)) / 1e-6
        size = 1e-3 * float(rng.uniform(0.1, 1.0))
        # Shrink along the path until the series premise holds.
        while True:
            pp = PerturbationPair(c.A, build(size * spectral_norm(c.A) / unit))
            try:
                b37, b312 = bound_case3(pp)
                break
            except PremiseViolated:
                size /= 4
        smallest = min(smallest, pp.norm_e / pp.norm_a)
        assert pp.profile.case3 and pp.norm_e / pp.norm_a <= 1e-3 * (1 + 1e-9)
        if b37.applicable:
            n37 += 1
            v37 += b37.exact > b37.value + 1e-10
        v312 += b312.exact > b312.value
        margin312 = min(margin312, b312.value / b312.exact)
    ok = v35 == 0 and v37 == 0 and v312 == 0 and n37 == 50
    record(5, ok, f"(3.5) {v35}/50, (3.7) {v37}/{n37}, (3.12) {v312}/50 violations; "
                  f"min (3.12)/exact = {margin312:.2f}; smallest ||E||/||A|| = {smallest:.1e}")


def test_criterion_6_continuity():
    lib = continuity_library()
    agree = 0
    for f in lib:
        v = rank_criterion(f.sequence)
        agree += v.predicted_convergent == v.empirical_convergent == f.convergent
    v = rank_criterion(load_sequence("jordan_tail_sequence"))
    js = np.array(v.j_values, dtype=float)
    norm_err = np.max(np.abs(np.array(v.core_ep_norms) - js) / js)
    ok = len(lib) >= 10 and agree == len(lib) and list(js) == [5, 10, 20, 50] and norm_err <= 1e-8
    record(6, ok, f"{agree}/{len(lib)} fixtures consistent; "
                  f"max | ||A_j^c|| - j | / j = {norm_err:.2e}")


def test_criterion_7_lower_bound():
    rng = np.random.default_rng(77)
    # delta^k must stay well above the rank tolerance for the jump to be visible.
    worst = np.inf
    for i in range(20):
        k = 1 + i % 4
        n = int(rng.integers(k + 1, 11))
        c, e = ensembles.rank_jump_pair(rng, n, k, delta=10.0 ** rng.uniform(-2, -0.5))
        rep = lower_bound_rank_jump(c.A, e)
        worst = min(worst, rep.exact - rep.value)
    record(7, worst >= -1e-10, f"min ||(A+E)^c|| - bound = {worst:.3e} (>= -1e-10)")


def test_criterion_8_semistable():
    rng = np.random.default_rng(88)
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(20):
        n = int(rng.integers(2, 9))
        c = ensembles.semistable_matrix(rng, n)
        p = c.p
        blk = np.zeros((n, n), dtype=complex)
        blk[:p, :p] = rng.normal(size=(p, p)) + 1j * rng.normal(size=(p, p))
        blk *= 0.1 / spectral_norm(blk)
        e = c.lift(blk)
        ref = core_ep_inverse(c.A + e).X
        val = integral_core_ep_perturbed(c.A, e).value
        worst = max(worst, spectral_norm(val - ref) / spectral_norm(ref))
    for _ in range(10):
        c = ensembles.stable_matrix(rng, int(rng.integers(1, 9)))
        inv = np.linalg.inv(c.A)
        val = integral_inverse_stable(c.A).value
        worst = max(worst, spectral_norm(val - inv) / spectral_norm(inv))
    dt = time.perf_counter() - t0
    record(8, worst <= 1e-6 and dt < 60, f"max relative error {worst:.2e} (<= 1e-6), {dt:.2f} s")


def test_criterion_9_profiles():
    expected = {
        "range_inclusion_pair": (True, False, False),
        "projector_pair": (False, True, True),
        "rank_pair": (False, False, True),
    }
    got = {}
    for name in expected:
        p = classify(*load_pair(name))
        got[name] = (p.case1, p.case2, p.case3)
    rng = np.random.default_rng(99)
    tested = implied = 0
    for i in range(150):
        k = 1 + i % 4
        n = int(rng.integers(k + 2, 10))
        maker = (ensembles.case1_pair, ensembles.case2_pair, ensembles.case3_pair)[i % 3]
        c, e = maker(rng, n, k)
        if i % 5 == 0:
            e = e + 1e-3 * (rng.normal(size=e.shape) + 1j * rng.normal(size=e.shape))
        p = classify(c.A, e)
        if p.case2:
            tested += 1
            implied += p.case3
    ok = got == expected and implied == tested and tested > 0
    record(9, ok, f"example flags {'match' if got == expected else got}; "
                  f"case2 => case3 on {implied}/{tested} pairs with case 2")
