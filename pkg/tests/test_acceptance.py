"""Acceptance gate: one pass/fail line per criterion.

Every numbered check is exact or exhaustively audited at the stated
tolerance; Monte Carlo appears only where a criterion asks for it and is
always accompanied by its Hoeffding width.
"""

import itertools
import math
import random
import time

import numpy as np

from cckit.bitlinalg import (
    Bitstring,
    LinearCode,
    all_bitstrings,
    irreducible_polynomial,
)
from cckit.distill import (
    EcParams,
    PaParams,
    distill_pipeline,
    make_noisy_correlated_source,
)
from cckit.entropy import ClassicalJoint, check_chain_rule, hmin_classical, pguess_classical
from cckit.fsauth import (
    AttackStrategy,
    Cipher,
    CipherChannel,
    FsParams,
    ProductState,
    check_guessing_lemmas,
    honest_accept_rate,
    impersonation_accept_rate,
    key_replace,
    noise_reject_rate,
    pauli_library,
    recover,
    recycled_key_entropy,
    run_attack,
    uniform_key_source,
)
from cckit.harness import (
    ConstructionClaim,
    ExperimentConfig,
    compose_parallel,
    compose_serial,
    const_comb,
    fixed_inputs_strategy,
    hoeffding_width,
    report_hash,
    run_experiment,
    verify_claim,
)
from cckit.hashing import (
    ExtractorSpec,
    HashFamily,
    MacSpec,
    audit_strong_universality,
    gf_multiply_extractor,
    hash_eval,
    lift_to_subnormalized,
    measure_extractor_distance,
    toeplitz_extractor,
)
from cckit.quantum import (
    DensityOperator,
    generalized_trace_distance,
    purified_distance,
)

B = Bitstring.from_str
IGNORE = fixed_inputs_strategy([None])


def _report(num: int, ok: bool, detail: str) -> None:
    line = f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'}: {detail}"
    print(line)
    assert ok, line


def test_criterion_01_distance_chain():
    rng = np.random.default_rng(20260823)
    t0 = time.time()
    violations = 0
    worst = 0.0
    for _ in range(10_000):
        dim = int(rng.integers(2, 9))
        mats = []
        for _ in range(2):
            g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            m = g @ g.conj().T
            m = m / m.trace().real * rng.uniform(0.05, 1.0)
            mats.append(DensityOperator(m, check=False))
        rho, sigma = mats
        dbar = generalized_trace_distance(rho, sigma)
        p = purified_distance(rho, sigma)
        if not (dbar <= p + 1e-9 and p <= math.sqrt(2 * dbar) + 1e-9):
            violations += 1
        worst = max(worst, dbar - p, p - math.sqrt(2 * dbar))
    elapsed = time.time() - t0
    _report(
        1,
        violations == 0 and elapsed < 30,
        f"distance chain: {violations} violations in 10^4 pairs "
        f"(worst slack {worst:.2e}, {elapsed:.1f}s)",
    )


def test_criterion_02_strong_universality():
    t0 = time.time()
    ok = True
    found = []
    for m in (2, 3, 4):
        eps = audit_strong_universality(MacSpec(m, m, 2.0**-m)).epsilon
        found.append(eps)
        ok = ok and eps == 2.0**-m  # exact: powers of two are float-exact
    elapsed = time.time() - t0
    _report(
        2,
        ok and elapsed < 10,
        f"strong universality eps_mac = {found} at m = (2, 3, 4) ({elapsed:.1f}s)",
    )


def test_criterion_03_extractor_flat_sources():
    t0 = time.time()
    spec = toeplitz_extractor(4, 1)
    xs = list(all_bitstrings(4))
    worst = 0.0
    for support in itertools.combinations(xs, 4):  # every flat source at Hmin = 2
        src = ClassicalJoint({(x, "e"): 0.25 for x in support})
        worst = max(worst, measure_extractor_distance(spec, src))
    elapsed = time.time() - t0
    _report(
        3,
        worst <= 0.35356 and elapsed < 60,
        f"extractor worst distance {worst:.5f} <= 0.35356 over all 1820 "
        f"flat sources ({elapsed:.1f}s)",
    )


def test_criterion_04_subnormalized_lift():
    rated = toeplitz_extractor(4, 1).rated(3)
    lifted = lift_to_subnormalized(rated)
    k_lift, eps_lift = lifted.rating
    assert k_lift == 4 and math.isclose(eps_lift, 0.5)
    xs = list(all_bitstrings(4))
    worst = 0.0
    # mass 1/4: every 4-atom support at weight 1/16 (Hmin = 4 = k + 1)
    for support in itertools.combinations(xs, 4):
        src = ClassicalJoint({(x, "e"): 1 / 16 for x in support})
        worst = max(worst, measure_extractor_distance(lifted, src))
    # mass 1/2: seeded sample of 8-atom supports at the same rating
    rng = random.Random(404)
    for _ in range(500):
        support = rng.sample(xs, 8)
        src = ClassicalJoint({(x, "e"): 1 / 16 for x in support})
        worst = max(worst, measure_extractor_distance(lifted, src))
    _report(
        4,
        worst <= 0.5,
        f"lifted rating (k+1, 2*eps) = (4, 0.5): worst subnormalized "
        f"distance {worst:.5f} <= 0.5",
    )


def test_criterion_05_pipeline_bound():
    t0 = time.time()
    n = 6
    mod = irreducible_polynomial(n)
    from cckit.bitlinalg import gf_mul_int

    mul = np.zeros((64, 64), dtype=np.int64)
    for a in range(64):
        for b in range(64):
            mul[a, b] = gf_mul_int(a, b, mod)
    S = mul >> 4  # 2-bit syndrome (top bits, index 0 = msb)
    T = mul >> 4  # 2-bit verification tag, same family
    K = mul >> 5  # 1-bit final key

    eps_verif = 0.25  # audited 2^-2 collision bound of the gf family
    eps_pa = gf_multiply_extractor(6, 1).eps_at(1.0)  # k = 5 - r - t = 1
    bound = eps_verif + eps_pa

    xw = np.full(64, 1 / 64)
    worst = 0.0
    for leak_bit in range(6):  # exhaustive single-bit leak patterns
        e = (np.arange(64) >> (5 - leak_bit)) & 1
        dist = 0.0
        for ys in range(64):
            for yv in range(64):
                g = e * 16 + S[:, ys] * 4 + T[:, yv]  # 32 view groups
                idx = (np.arange(64)[None, :] * 64) + g[:, None] * 2 + K
                counts = np.bincount(idx.ravel(), weights=np.repeat(xw, 64),
                                     minlength=64 * 64).reshape(64, 32, 2)
                ideal = 0.5 * counts.sum(axis=-1, keepdims=True)
                dist += 0.5 * np.abs(counts - ideal).sum() / 64
        dist /= 64 * 64
        worst = max(worst, dist)

    # the same construction runs end to end through the pipeline api
    ec = EcParams(2, 2, 0.0, gf_multiply_extractor(6, 2),
                  HashFamily("gf-multiply-affine", 6, 2), eps_verif)
    pa = PaParams(gf_multiply_extractor(6, 1), m=1, k=1.0)
    src = make_noisy_correlated_source(6, 0.0, 5)
    agree = all(
        not (res := distill_pipeline(src, ec, pa, seed)).aborted
        and res.key_alice == res.key_bob
        for seed in range(50)
    )
    elapsed = time.time() - t0
    _report(
        5,
        worst <= bound + 1e-12 and agree and elapsed < 300,
        f"pipeline final-key distance {worst:.5f} <= eps_verif + eps_pa = "
        f"{bound} over exhaustive leak patterns ({elapsed:.1f}s)",
    )


def test_criterion_06_verification_soundness():
    fam = HashFamily("gf-multiply-affine", 6, 3)
    keys = list(all_bitstrings(fam.r))
    tags = {x: [hash_eval(fam, k, x) for k in keys] for x in all_bitstrings(6)}
    worst = 0.0
    for x1, x2 in itertools.combinations(tags, 2):
        frac = sum(a == b for a, b in zip(tags[x1], tags[x2])) / len(keys)
        worst = max(worst, frac)
    _report(
        6,
        worst == 2.0**-3,
        f"verification soundness: worst acceptance fraction {worst} == 2^-3 "
        f"over all pairs, exhaustive keys at t = 3",
    )


def _fs_params_n4():
    return FsParams(
        m=1,
        n=4,
        code=LinearCode([B("0000"), B("1111")]),
        ss=gf_multiply_extractor(4, 1),
        mac=MacSpec(6, 2, 0.25),
        phi=0.25,  # phi * n = 1
        k=1.0,
    )


def test_criterion_07_honest_completeness_and_robustness():
    t0 = time.time()
    params = _fs_params_n4()
    y = B("0")
    rate = honest_accept_rate(params, y)
    ok = rate == 1.0

    # eps_ss: exhaustive recovery-failure rate over sketch keys and x,
    # maximized over flip patterns of weight <= phi*n
    patterns = [Bitstring.zeros(4)] + [
        Bitstring.from_int(1 << (3 - i), 4) for i in range(4)
    ]
    ss_keys = list(all_bitstrings(params.r_ss))
    eps_ss = 0.0
    per_pattern_fail = {}
    for pat in patterns:
        fails = 0
        for l_ss in ss_keys:
            for x in all_bitstrings(4):
                s = hash_eval(params.ss.family, l_ss, x)
                fails += recover(params, x ^ pat, s, l_ss) != x
        frac = fails / (len(ss_keys) * 16)
        per_pattern_fail[pat] = frac
        eps_ss = max(eps_ss, frac)

    # rejecting requires a recovery failure, so the exact reject rate is
    # bounded by eps_ss for every in-radius pattern
    for pat in patterns:
        rej = noise_reject_rate(params, y, pat)
        ok = ok and rej <= per_pattern_fail[pat] + 1e-12 and rej <= eps_ss + 1e-12

    # monte carlo at 10^5 trials against the exact rate
    mc_pat = B("0100")
    exact_rej = noise_reject_rate(params, y, mc_pat)
    trials = 100_000
    src = uniform_key_source(params)
    strat = AttackStrategy("noise", pattern=mc_pat)
    rejects = sum(
        not run_attack(params, src, strat, seed=i, y=y).decision
        for i in range(trials)
    )
    freq = rejects / trials
    width = hoeffding_width(trials)
    ok = ok and abs(freq - exact_rej) <= width
    elapsed = time.time() - t0
    _report(
        7,
        ok,
        f"honest accept rate {rate}; reject rates <= eps_ss = {eps_ss:.4f} "
        f"exhaustively; MC {freq:.4f} within {width:.4f} of exact "
        f"{exact_rej:.4f} ({elapsed:.1f}s)",
    )


def test_criterion_08_forgery():
    ok = True
    rates = {}
    for m_mac in (2, 3):
        params = FsParams(
            m=1,
            n=2,
            code=LinearCode([B("00"), B("11")]),
            ss=ExtractorSpec(HashFamily("toeplitz-affine", 2, 0)),
            mac=MacSpec(3, m_mac, 2.0**-m_mac),
            phi=0.0,
            k=1.0,
        )
        worst = 0.0
        for yv in all_bitstrings(1):
            for t in all_bitstrings(m_mac):
                for bits in all_bitstrings(2):
                    for bases in all_bitstrings(2):
                        forged = Cipher(yv, Bitstring.zeros(0), t,
                                        ProductState(bits, bases))
                        worst = max(worst, impersonation_accept_rate(params, forged))
        rates[m_mac] = worst
        ok = ok and worst == 2.0**-m_mac
    _report(
        8,
        ok,
        f"forgery acceptance over exhaustive forgeries: {rates} == 2^-m_mac exactly",
    )


def _fs_params_n2():
    return FsParams(
        m=1,
        n=2,
        code=LinearCode([B("00"), B("11")]),
        ss=gf_multiply_extractor(2, 1),
        mac=MacSpec(4, 2, 0.25),
        phi=0.0,
        k=1.0,
    )


def test_criterion_09_recycled_key_entropy():
    t0 = time.time()
    params = _fs_params_n2()
    channels = [CipherChannel("identity", label="identity")]
    channels += pauli_library(2)
    channels.append(CipherChannel("measure-resend", basis=B("00"), label="mr-comp"))
    channels.append(CipherChannel("measure-resend", basis=B("11"), label="mr-hadamard"))
    channels.append(CipherChannel("classical-tamper", dt=B("01"), label="tag-tamper"))
    brackets = recycled_key_entropy(params, channels, B("0"))
    bad = {lab: b.lo for lab, b in brackets.items() if b.lo < params.k - 1e-6}
    elapsed = time.time() - t0
    lows = min(b.lo for b in brackets.values())
    _report(
        9,
        not bad and elapsed < 600,
        f"recycled-key entropy lo >= k = 1 on the accept branch for all "
        f"{len(channels)} channels (min lo = {lows}, {elapsed:.1f}s)",
    )


def test_criterion_10_guessing_lemmas():
    recs = check_guessing_lemmas(1, LinearCode([B("0"), B("1")]), tol=1e-6)
    recs += check_guessing_lemmas(2, LinearCode([B("00"), B("11")]), tol=1e-6)
    bad = [r for r in recs if not r["holds"]]
    _report(
        10,
        not bad,
        f"guessing-game corollaries hold on all {len(recs)} (channel, prior) "
        f"instances at n in (1, 2)",
    )


def test_criterion_11_key_replacement():
    n = k = 3
    # branch audit: fresh-branch and kept-branch guessing probability are
    # each exactly 2^-3; their sum is the replacement bound 2^-n + 2^-k
    fresh = ClassicalJoint({(t, "old-theta"): 1 / 8 for t in range(8)})
    kept = ClassicalJoint({(t, "no-info"): 1 / 8 for t in range(8)})
    audited = pguess_classical(fresh) + pguess_classical(kept)
    ok = math.isclose(audited, 2 * 2.0**-3)
    # any mixture of the branches guesses no better than the audited sum
    for p_c in (0.0, 0.25, 0.5, 1.0):
        mix = ClassicalJoint(
            {((t, "f"), e): p_c * p for (t, e), p in fresh.table.items()}
            | {((t, "k"), e): (1 - p_c) * p for (t, e), p in kept.table.items()}
        )
        ok = ok and pguess_classical(mix) <= audited + 1e-12
    res = key_replace(Bitstring.zeros(n), Bitstring.zeros(n), k=float(k))
    ok = ok and res.k_prime == 2.0
    _report(
        11,
        ok,
        f"key replacement: audited pguess sum {audited} = 2*2^-3, "
        f"k' = {res.k_prime} exactly",
    )


def test_criterion_12_composition_accounting():
    def claim(br, bi, eps, rl, il):
        return ConstructionClaim(
            protocol=f"{rl}->{il}",
            real=const_comb({"h": br, "t": 1 - br}, rl),
            ideal=const_comb({"h": bi, "t": 1 - bi}, il),
            epsilon=eps,
        )

    c1 = claim(0.6, 0.55, 0.05, "real", "mid")
    c2 = claim(0.55, 0.5, 0.05, "mid", "ideal")
    serial = compose_serial(c1, c2)
    ok_s, lo_s, _ = verify_claim(serial, [IGNORE], exhaustive=True)
    parallel = compose_parallel(c1, c2)
    ok_p, lo_p, _ = verify_claim(parallel, [IGNORE], exhaustive=True)
    ok = ok_s and lo_s <= serial.epsilon + 1e-12
    ok = ok and ok_p and lo_p <= parallel.epsilon + 1e-12
    # negative control: an understated error must fail
    broken = claim(0.6, 0.5, 0.05, "real", "ideal")
    ok_b, lo_b, _ = verify_claim(broken, [IGNORE], exhaustive=True)
    ok = ok and not ok_b and lo_b > broken.epsilon
    _report(
        12,
        ok,
        f"composition: serial adv {lo_s:.3f} <= {serial.epsilon}, parallel adv "
        f"{lo_p:.3f} <= {parallel.epsilon}; broken fixture correctly fails "
        f"({lo_b:.3f} > 0.05)",
    )


def test_criterion_13_chain_rule_and_conditioning():
    rng = random.Random(11)
    chain_violations = 0
    cond_violations = 0
    for _ in range(10_000):
        nx = rng.randint(1, 8)
        nz = rng.randint(1, 8)
        table = {}
        for x in range(nx):
            for bflag in range(2):
                for z in range(nz):
                    if rng.random() < 0.75:
                        table[(x, bflag, z)] = rng.random()
        if not table:
            continue
        tot = sum(table.values())
        scale = rng.uniform(0.3, 1.0) / tot
        table = {k: v * scale for k, v in table.items()}
        if not check_chain_rule(table, tol=1e-9).holds:
            chain_violations += 1
        # event conditioning on the binary middle register
        whole = ClassicalJoint(
            {(x, (bflag, z)): p for (x, bflag, z), p in table.items()}
        )
        for sel in (0, 1):
            branch = ClassicalJoint(
                {(x, z): p for (x, bflag, z), p in table.items() if bflag == sel}
            )
            if hmin_classical(branch) < hmin_classical(whole) - 1e-9:
                cond_violations += 1
    _report(
        13,
        chain_violations == 0 and cond_violations == 0,
        f"chain rule: {chain_violations} violations; event conditioning: "
        f"{cond_violations} violations in 10^4 fuzzed instances",
    )


def test_criterion_14_determinism():
    cfg = ExperimentConfig.from_dict({"seed": 20260823, "trials": 400})
    h1 = report_hash(run_experiment(cfg))
    h2 = report_hash(run_experiment(cfg))
    _report(
        14,
        h1 == h2,
        f"full-suite determinism hash stable across runs: {h1[:16]}...",
    )
