"""End-to-end acceptance checks over the five fixture rings.

Each test records one line in ``RESULTS``; the lines are printed as the
test runs (visible with ``-s``) and again in the terminal summary.
"""

from __future__ import annotations

import itertools
import random

from gradedhom.fixtures import ring
from gradedhom.homalg import (
    Dualizer,
    depth,
    gc_dim,
    is_semidualizing,
    stable_equiv_mod_add,
    transpose,
    transpose_decompose,
    transpose_ses,
)
from gradedhom.matrix import Matrix
from gradedhom.module import (
    FpModule,
    ModuleMap,
    clear_caches,
    direct_sum,
    ext,
    free_resolution,
    hilbert_series,
    is_isomorphic,
    minimal_presentation,
    syzygy,
    syzygy_sequence,
)
from gradedhom.oracle import ext_dims
from gradedhom.sentinels import INFINITY
from gradedhom.spectrum import (
    PROJECTIVES,
    Extension,
    FreeModule,
    Generator,
    GradeFnTable,
    Kernel,
    ResolvingWitness,
    Summand,
    Syzygy,
    check_resolving_witness,
    is_grade_consistent,
    lambda_member,
    local_depth,
    local_pd,
    make_prime,
    maximal_ideal,
    phi,
)

from conftest import RING_NAMES, fixture_modules

RESULTS: dict[int, str] = {}
BOUND = 20


def record(n: int, title: str, failures: list, checked: int) -> None:
    status = "PASS" if not failures and checked else "FAIL"
    line = f"criterion {n:2d} {status}  {title} ({checked} checks, {len(failures)} failures)"
    RESULTS[n] = line
    print(line)
    for f in failures[:10]:
        print(f"    {f}")
    assert checked, "nothing was checked"
    assert not failures, failures


def nonzero_fixtures(name):
    return {k: M for k, M in fixture_modules(name).items() if minimal_presentation(M).ngens}


def iso_up_to_shift(M, N):
    return is_isomorphic(M, N, allow_shift=True).verdict == "Iso"


def test_criterion_01_auslander_buchsbaum():
    failures, checked = [], 0
    for name, dR_expected in (("R2", 0), ("R3", 1)):
        R = ring(name)
        C = Dualizer.ring(R, BOUND)
        dR = depth(FpModule.free(R))
        if dR != dR_expected:
            failures.append(f"{name}: depth R = {dR}, expected {dR_expected}")
        for label, X in nonzero_fixtures(name).items():
            v = gc_dim(X, C, BOUND)
            if v.value is INFINITY:
                continue
            checked += 1
            if v.value + depth(X) != dR_expected:
                failures.append(f"{name} {label}: {v.value} + {depth(X)} != {dR_expected}")
    record(1, "gc_dim + depth X = depth R over R2, R3", failures, checked)


def _ext_index(X, C0, bound):
    """min{n : Ext^i(X, C) = 0 for n < i <= bound}, scanning Ext modules directly."""
    for i in range(bound, 0, -1):
        if minimal_presentation(ext(X, C0, i)).ngens:
            return i
    return 0


def test_criterion_02_cdim():
    failures, checked = [], 0
    for name in RING_NAMES:
        R = ring(name)
        C = Dualizer.ring(R, BOUND)
        for label, X in fixture_modules(name).items():
            v = gc_dim(X, C, BOUND)
            if v.value is INFINITY:
                continue
            n = _ext_index(minimal_presentation(X), FpModule.free(R), BOUND)
            if n == BOUND:
                continue
            checked += 1
            if v.value != n:
                failures.append(f"{name} {label}: gc_dim {v.value} vs Ext index {n}")
    record(2, "gc_dim equals the Ext vanishing index", failures, checked)


def test_criterion_03_transpose_involution():
    failures, checked = [], 0
    for name in ("R2", "R3"):
        R = ring(name)
        C = Dualizer.ring(R, BOUND)
        for label, X in fixture_modules(name).items():
            tt = transpose(transpose(X, C).module, C).module
            checked += 1
            v = stable_equiv_mod_add(tt, X, C, 4)
            if v.verdict != "Yes":
                failures.append(f"{name} {label}: {v.verdict}")
    record(3, "⊺⊺X stably equivalent to X over R2, R3", failures, checked)


def test_criterion_04_six_term_exactness():
    failures, checked = [], 0
    for name in RING_NAMES:
        R = ring(name)
        C = Dualizer.ring(R, BOUND)
        for label, X in fixture_modules(name).items():
            _, _, _, inc, proj = syzygy_sequence(X)
            six = transpose_ses(inc, proj, C)
            checked += 1
            if not six.certified or len(six.exact) != 6:
                failures.append(f"{name} {label}: exact at {six.exact}")
    record(4, "six-term sequence exact on syzygy sequences", failures, checked)


def test_criterion_05_filtration_sequence():
    failures, checked = [], 0
    for name in RING_NAMES:
        R = ring(name)
        C = Dualizer.ring(R, BOUND)
        for label, X in fixture_modules(name).items():
            d = transpose_decompose(X, C)
            checked += 1
            if not d.certified:
                failures.append(f"{name} {label}: not exact {d.exact}")
            if not d.hilbert_identity(10):
                failures.append(f"{name} {label}: HS(T) != HS(E) + HS(S)")
    record(5, "filtration sequence exact, Hilbert identity to degree 10", failures, checked)


def test_criterion_06_transpose_dimension():
    R = ring("R3")
    C = Dualizer.ring(R, BOUND)
    tk = transpose(FpModule.residue_field(R), C).module
    v = gc_dim(tk, C, BOUND)
    failures = [] if v.value == 1 else [f"gc_dim(⊺k) = {v.value}"]
    record(6, "gc_dim(⊺k) = 1 over R3", failures, 1)


def test_criterion_07_semidualizing_gate():
    failures, checked = [], 0
    for name in RING_NAMES:
        checked += 1
        v = is_semidualizing(FpModule.free(ring(name)), BOUND)
        if not v.ok:
            failures.append(f"{name}: R rejected {v}")
    R1 = ring("R1")
    Q = FpModule.quotient_ring(R1, ["x"])
    v = is_semidualizing(Q, BOUND)
    checked += 1
    if v.ok:
        failures.append("R/(x) over R1 accepted")
    elif v.witness.condition != "ext" or v.witness.index != 1 or not iso_up_to_shift(v.witness.module, Q):
        failures.append(f"R/(x) over R1: wrong witness {v}")
    record(7, "semidualizing gate", failures, checked)


def test_criterion_08_regular_degeneration():
    R = ring("R4")
    C = Dualizer.ring(R, BOUND)
    cases = {
        "k": (FpModule.residue_field(R), 2),
        "R/(x)": (FpModule.quotient_ring(R, ["x"]), 1),
        "R": (FpModule.free(R), 0),
    }
    failures = []
    for label, (X, expected) in cases.items():
        g = gc_dim(X, C, BOUND).value
        length = free_resolution(X, BOUND).length()
        if not g == length == expected:
            failures.append(f"{label}: gc_dim {g}, resolution length {length}, expected {expected}")
    record(8, "gc_dim = pd over R4", failures, len(cases))


def _primes(R):
    px = make_prime(R, "px", ["x"])
    py = make_prime(R, "py", ["y"])
    m = make_prime(R, "m", ["x", "y"], ["px", "py"])
    return [px, py, m]


def test_criterion_09_phi_lambda():
    R = ring("R4")
    primes = _primes(R)
    Q = FpModule.quotient_ring(R, ["x"])
    failures = []
    f = phi([Q], PROJECTIVES, primes, BOUND)
    if f.values(primes) != [1, 0, 1]:
        failures.append(f"phi = {f.values(primes)}")
    if is_grade_consistent(f, primes, R).verdict != "Yes":
        failures.append("phi is not grade consistent")
    if lambda_member(Q, f, PROJECTIVES, primes, BOUND).verdict != "Yes":
        failures.append("R/(x) not in Lambda(phi)")
    zero = GradeFnTable({p.label: 0 for p in primes})
    v = lambda_member(Q, zero, PROJECTIVES, primes, BOUND)
    if v.verdict != "No" or v.prime != "px":
        failures.append(f"lambda against 0: {v}")
    record(9, "Phi lands in Gamma and round-trips", failures, 4)


def test_criterion_10_localization():
    failures, checked = [], 0
    for name in RING_NAMES:
        R = ring(name)
        m = maximal_ideal(R)
        for label, X in nonzero_fixtures(name).items():
            checked += 1
            if local_depth(X, m) != depth(X):
                failures.append(f"{name} {label}: local depth {local_depth(X, m)} vs depth {depth(X)}")
            if name == "R4":
                checked += 1
                lp = local_pd(X, m, BOUND).value
                length = free_resolution(X, BOUND).length()
                if lp != length:
                    failures.append(f"R4 {label}: local pd {lp} vs length {length}")
    record(10, "localization at m agrees with global invariants", failures, checked)


def test_criterion_11_oracle():
    failures, checked = [], 0
    top = 8
    for name in ("R2", "R4"):
        mods = fixture_modules(name)
        for (lm, M), (ln, N) in itertools.product(mods.items(), repeat=2):
            res = free_resolution(M, 4)
            for i in range(4):
                tw = res.twists[i]
                lo = min(N.degrees, default=0) - max(tw, default=0) - 1
                engine = hilbert_series(ext(M, N, i), top, lo)
                oracle = ext_dims(M, N, i, lo, top, res)
                checked += 1
                if engine != oracle:
                    failures.append(f"{name} Ext^{i}({lm}, {ln}): {engine} vs {oracle}")
    record(11, "Ext dimensions match the degreewise oracle", failures, checked)


def test_criterion_12_join_law():
    rng = random.Random(12)
    failures, checked = [], 0
    settings = [("R4", PROJECTIVES), ("R3", PROJECTIVES), ("R3", "dualizer")]
    pools = {}
    for name, _ in settings:
        R = ring(name)
        pools[name] = (list(fixture_modules(name).values()), _primes(R), Dualizer.ring(R, BOUND))
    for trial in range(20):
        name, kind = settings[trial % len(settings)]
        pool, primes, C = pools[name]
        kind = C if kind == "dualizer" else kind
        S1 = rng.sample(pool, rng.randint(1, 2))
        S2 = rng.sample(pool, rng.randint(1, 2))
        joined = phi(S1 + S2, kind, primes, BOUND)
        expected = phi(S1, kind, primes, BOUND).pointwise_max(phi(S2, kind, primes, BOUND))
        checked += 1
        if joined != expected:
            failures.append(f"trial {trial} over {name}: {joined.entries} vs {expected.entries}")
    record(12, "phi(S1 ∪ S2) is the pointwise max", failures, checked)


# witnesses -----------------------------------------------------------------------------------


def _m(src, tgt, rows, check=True):
    return ModuleMap(src, tgt, Matrix.from_rows(src.ring, rows), check=check)


def _witness_cases():
    """(label, witness, S, target, corrupted node or None)."""
    R4, R3, R2 = ring("R4"), ring("R3"), ring("R2")
    k4, Q4, F4 = FpModule.residue_field(R4), FpModule.quotient_ring(R4, ["x"]), FpModule.free(R4)
    k2, F2 = FpModule.residue_field(R2), FpModule.free(R2)
    Q3 = FpModule.quotient_ring(R3, ["x"])
    Om4 = syzygy(k4, 1)
    kQ = direct_sum(k4, Q4)
    split_f = _m(k4, kQ, [["1"], ["0"]])
    split_g = _m(kQ, Q4, [["0", "1"]])
    # 0 -> R(-1) -x-> R -> R/(x) -> 0
    F4x = FpModule.free(R4, [1])
    mult_x = _m(F4x, F4, [["x"]])
    to_Q = _m(F4, Q4, [["1"]])
    # 0 -> Omega k -> R -> k -> 0
    _, _, _, inc, proj = syzygy_sequence(k4)
    kF = direct_sum(k2, F2)
    kF_f = _m(k2, kF, [["1"], ["0"]])
    kF_g = _m(kF, F2, [["0", "1"]])
    swap = _m(direct_sum(k2, F2), kF, [["1", "0"], ["0", "1"]])

    valid = [
        ("generator", ResolvingWitness({"g": Generator(0)}, "g"), [k4], k4),
        ("syzygy", ResolvingWitness({"g": Generator(0), "s": Syzygy("g")}, "s"), [k4], Om4),
        ("free", ResolvingWitness({"f": FreeModule((0, 1))}, "f"), [k4], FpModule.free(R4, [0, 1])),
        (
            "second syzygy",
            ResolvingWitness({"g": Generator(0), "s": Syzygy("g"), "t": Syzygy("s")}, "t"),
            [k4],
            FpModule.free(R4, [2]),
        ),
        (
            "split extension",
            ResolvingWitness({"a": Generator(0), "b": Generator(1), "e": Extension("a", "b", kQ, split_f, split_g)}, "e"),
            [k4, Q4],
            kQ,
        ),
        (
            "nonsplit extension",
            ResolvingWitness(
                {"a": FreeModule((1,)), "b": Generator(0), "e": Extension("a", "b", F4, mult_x, to_Q)}, "e"
            ),
            [Q4],
            F4,
        ),
        (
            "kernel",
            ResolvingWitness({"r": FreeModule((0,)), "k": Generator(0), "ker": Kernel("r", "k", Om4, inc, proj)}, "ker"),
            [k4],
            Om4,
        ),
        (
            "summand with map",
            ResolvingWitness(
                {
                    "a": Generator(0),
                    "r": FreeModule((0,)),
                    "e": Extension("a", "r", kF, kF_f, kF_g),
                    "s": Summand("e", F2, k2, swap),
                },
                "s",
            ),
            [k2],
            k2,
        ),
        (
            "summand by search",
            ResolvingWitness({"g": Generator(0), "s": Summand("g", k4, Q4)}, "s"),
            [kQ],
            Q4,
        ),
        (
            "syzygy over R3",
            ResolvingWitness({"g": Generator(0), "s": Syzygy("g")}, "s"),
            [Q3],
            FpModule.quotient_ring(R3, ["y"], 1),
        ),
    ]
    corrupted = [
        (
            "extension with non-injective left map",
            ResolvingWitness(
                {"a": FreeModule((1,)), "b": Generator(0), "e": Extension("a", "b", F4, _m(F4x, F4, [["0"]]), to_Q)},
                "e",
            ),
            [Q4],
            F4,
            "e",
        ),
        (
            "summand with a non-invertible map",
            ResolvingWitness(
                {
                    "a": Generator(0),
                    "r": FreeModule((0,)),
                    "e": Extension("a", "r", kF, kF_f, kF_g),
                    "s": Summand("e", F2, k2, _m(direct_sum(k2, F2), kF, [["1", "0"], ["0", "0"]])),
                },
                "s",
            ),
            [k2],
            k2,
            "s",
        ),
        (
            "kernel with zero projection",
            ResolvingWitness(
                {"r": FreeModule((0,)), "k": Generator(0), "ker": Kernel("r", "k", Om4, inc, _m(F4, k4, [["0"]]))},
                "ker",
            ),
            [k4],
            Om4,
            "ker",
        ),
        (
            "extension with an ill-defined map",
            ResolvingWitness(
                {
                    "a": Generator(0),
                    "b": Generator(1),
                    "e": Extension("a", "b", kQ, split_f, _m(kQ, Q4, [["1", "1"]], check=False)),
                },
                "e",
            ),
            [k4, Q4],
            kQ,
            "e",
        ),
        (
            "summand with a false decomposition",
            ResolvingWitness({"g": Generator(0), "s": Summand("g", k4, k4)}, "s"),
            [kQ],
            k4,
            "s",
        ),
    ]
    return valid, corrupted


def test_criterion_13_witness_soundness():
    valid, corrupted = _witness_cases()
    failures = []
    for label, w, S, target in valid:
        clear_caches()
        v = check_resolving_witness(w, S, target)
        if v.verdict != "Valid":
            failures.append(f"valid '{label}' rejected: {v}")
    for label, w, S, target, node in corrupted:
        clear_caches()
        v = check_resolving_witness(w, S, target)
        if v.verdict != "Invalid" or v.node != node:
            failures.append(f"corrupted '{label}': {v}, expected Invalid at {node}")
    record(13, "10 valid witnesses verify, 5 corrupted ones are caught", failures, len(valid) + len(corrupted))
    assert len(valid) == 10 and len(corrupted) == 5
