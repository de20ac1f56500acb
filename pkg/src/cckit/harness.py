"""Abstract resources, converters, composition accounting, distinguishers,
and the experiment suites behind the CLI and service.

A comb is a sequence of stages over a private memory register; stages
are probabilistic and classical except for single-stage emitters of
density operators, which the distinguisher handles via the Helstrom
bound.  Distinguishing advantages are reported as (strategy-set lower
bound, upper bound) pairs; the upper bound tightens to the lower bound
only when the strategy set is declared exhaustive for the instance.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .bitlinalg import Bitstring, LinearCode, all_bitstrings
from .entropy import (
    Bracket,
    ClassicalJoint,
    check_chain_rule,
    condition_on_event_classical,
    hmin_classical,
    pguess_classical,
    pguess_cq,
)
from .errors import BudgetError, ConfigError, InputError
from .quantum import (
    CqState,
    DensityOperator,
    generalized_trace_distance,
    purified_distance,
    trace_distance,
)

HOEFFDING_CONFIDENCE = 0.99


def hoeffding_width(trials: int) -> float:
    """Two-sided 99% confidence half-width for a [0,1] mean estimate."""
    return math.sqrt(math.log(2.0 / (1.0 - HOEFFDING_CONFIDENCE)) / (2.0 * trials))


# -- combs and converters -----------------------------------------------


@dataclass(frozen=True)
class Comb:
    """Stages: callable(msg_in, mem) -> list of (prob, msg_out, mem')."""

    rounds: tuple
    mem0: object = None
    label: str = ""

    def run(self, strategy: Callable):
        """Full-transcript output law under an adaptive input strategy.

        Returns a dict {transcript: prob}, or a DensityOperator for a
        single-stage deterministic quantum emitter.
        """
        if len(self.rounds) == 1:
            outs = self.rounds[0](strategy(0, ()), self.mem0)
            if len(outs) == 1 and isinstance(outs[0][1], DensityOperator):
                return outs[0][1]
        states = {((), self.mem0): 1.0}
        for i, stage in enumerate(self.rounds):
            nxt = {}
            for (hist, mem), p in states.items():
                msg = strategy(i, hist)
                for q, out, mem2 in stage(msg, mem):
                    key = (hist + (out,), mem2)
                    nxt[key] = nxt.get(key, 0.0) + p * q
            states = nxt
        dist = {}
        for (hist, _), p in states.items():
            dist[hist] = dist.get(hist, 0.0) + p
        return dist


def const_comb(dist: dict, label: str = "") -> Comb:
    """One-shot comb that ignores its input and emits per the given law."""
    stages = (lambda _msg, mem: [(p, out, mem) for out, p in sorted(dist.items(), key=lambda kv: repr(kv[0]))],)
    return Comb(stages, label=label)


def quantum_emitter(rho: DensityOperator, label: str = "") -> Comb:
    return Comb((lambda _msg, mem: [(1.0, rho, mem)],), label=label)


@dataclass(frozen=True)
class Converter:
    """Local operation at one interface; transforms a comb into a comb."""

    interface: str  # A | B | E
    transform: Callable

    def __call__(self, resource: Comb) -> Comb:
        out = self.transform(resource)
        if not isinstance(out, Comb):
            raise InputError("converter must return a comb")
        return out


@dataclass(frozen=True)
class ConstructionClaim:
    """protocol applied to real lies within epsilon of ideal + simulator."""

    protocol: str
    real: Comb
    ideal: Comb
    simulator: Optional[Converter] = None
    epsilon: float = 0.0

    def __post_init__(self):
        if self.epsilon < 0:
            raise InputError("negative construction error")


def compose_serial(c1: ConstructionClaim, c2: ConstructionClaim) -> ConstructionClaim:
    """Chain constructions; errors add."""
    if c1.ideal.label != c2.real.label:
        raise InputError(
            f"interface mismatch: {c1.ideal.label!r} != {c2.real.label!r}"
        )
    return ConstructionClaim(
        protocol=f"{c2.protocol} . {c1.protocol}",
        real=c1.real,
        ideal=c2.ideal,
        simulator=c2.simulator,
        epsilon=c1.epsilon + c2.epsilon,
    )


def parallel_comb(a: Comb, b: Comb) -> Comb:
    """Independent resources scheduled sequentially: a's stages, then b's."""
    a_stage_count = len(a.rounds)

    def lift_a(stage):
        return lambda msg, mem: [
            (p, out, (m2, mem[1])) for p, out, m2 in stage(msg, mem[0])
        ]

    def lift_b(stage):
        return lambda msg, mem: [
            (p, out, (mem[0], m2)) for p, out, m2 in stage(msg, mem[1])
        ]

    rounds = tuple(lift_a(s) for s in a.rounds) + tuple(lift_b(s) for s in b.rounds)
    return Comb(rounds, mem0=(a.mem0, b.mem0), label=f"{a.label} || {b.label}")


def compose_parallel(c1: ConstructionClaim, c2: ConstructionClaim) -> ConstructionClaim:
    return ConstructionClaim(
        protocol=f"{c1.protocol} | {c2.protocol}",
        real=parallel_comb(c1.real, c2.real),
        ideal=parallel_comb(c1.ideal, c2.ideal),
        simulator=c1.simulator or c2.simulator,
        epsilon=c1.epsilon + c2.epsilon,
    )


def fixed_inputs_strategy(inputs: Sequence) -> Callable:
    return lambda i, _hist: inputs[i] if i < len(inputs) else None


def distinguish_exact(
    r1: Comb, r2: Comb, strategies: Sequence[Callable], exhaustive: bool = False
) -> tuple:
    """(lower bound, upper bound) on the distinguishing advantage.

    Per strategy the advantage is the trace distance of the final
    transcript laws (statistical distance for classical transcripts,
    Helstrom for quantum emitters).  The upper bound is honest: it
    equals the best strategy's distance only when the set is declared
    exhaustive for the instance, else 1.
    """
    if not strategies:
        raise InputError("need at least one strategy")
    best = 0.0
    for strat in strategies:
        o1, o2 = r1.run(strat), r2.run(strat)
        if isinstance(o1, DensityOperator) or isinstance(o2, DensityOperator):
            if not (isinstance(o1, DensityOperator) and isinstance(o2, DensityOperator)):
                raise InputError("mixed quantum/classical outputs")
            adv = trace_distance(o1, o2)
        else:
            keys = set(o1) | set(o2)
            adv = 0.5 * sum(abs(o1.get(k, 0.0) - o2.get(k, 0.0)) for k in keys)
        best = max(best, adv)
    return best, (best if exhaustive else 1.0)


def verify_claim(
    claim: ConstructionClaim,
    strategies: Sequence[Callable],
    exhaustive: bool = False,
    tol: float = 1e-9,
) -> tuple:
    """(passed, lo, hi): the claim passes iff no strategy beats epsilon."""
    lo, hi = distinguish_exact(claim.real, claim.ideal, strategies, exhaustive)
    return lo <= claim.epsilon + tol, lo, hi


def distinguish_mc(
    r1: Comb, r2: Comb, strategy: Callable, trials: int, seed: int
) -> tuple:
    """Empirical advantage of the strategy's likelihood-ratio guess,
    with the 99% Hoeffding half-width."""
    if trials < 1:
        raise InputError("trials must be positive")
    o1, o2 = r1.run(strategy), r2.run(strategy)
    if isinstance(o1, DensityOperator):
        raise InputError("monte-carlo distinguishing needs classical transcripts")

    def sampler(dist):
        items = sorted(dist.items(), key=lambda kv: repr(kv[0]))
        def draw(rng):
            u, acc = rng.random(), 0.0
            for out, p in items:
                acc += p
                if u < acc:
                    return out
            return items[-1][0]
        return draw

    draw1, draw2 = sampler(o1), sampler(o2)
    guess_one = {k for k in set(o1) | set(o2) if o1.get(k, 0.0) >= o2.get(k, 0.0)}
    rng = random.Random(seed)
    hit1 = sum(draw1(rng) in guess_one for _ in range(trials)) / trials
    hit2 = sum(draw2(rng) in guess_one for _ in range(trials)) / trials
    return abs(hit1 - hit2), hoeffding_width(trials)


# -- report records -----------------------------------------------------


@dataclass
class ReportRecord:
    id: str
    metric: str
    value: object
    bound: object
    passed: bool
    provenance: str  # exact | exhaustive | monte-carlo(...)
    seed: int = 0
    runtime: float = 0.0

    def to_doc(self) -> dict:
        def enc(v):
            if isinstance(v, Bracket):
                return json.loads(v.to_json())
            if isinstance(v, float) and math.isinf(v):
                return "inf"
            return v

        return {
            "id": self.id,
            "metric": self.metric,
            "value": enc(self.value),
            "bound": enc(self.bound),
            "passed": self.passed,
            "provenance": self.provenance,
            "seed": self.seed,
        }


def report_hash(records: Sequence[ReportRecord]) -> str:
    """Determinism hash: canonical JSON of the records, runtime excluded."""
    docs = sorted((r.to_doc() for r in records), key=lambda d: d["id"])
    blob = json.dumps(docs, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def records_to_csv(records: Sequence[ReportRecord]) -> list:
    rows = [["id", "metric", "value", "bound", "passed", "provenance", "seed"]]
    for r in sorted(records, key=lambda r: r.id):
        doc = r.to_doc()
        rows.append(
            [doc["id"], doc["metric"], json.dumps(doc["value"]), json.dumps(doc["bound"]),
             str(doc["passed"]).lower(), doc["provenance"], str(doc["seed"])]
        )
    return rows


# -- experiment suites --------------------------------------------------

SUITES = ("entropy", "hash-audit", "distill", "fsauth", "bounds", "lemmas")


def _rec(rid, metric, value, bound, passed, provenance, seed, t0) -> ReportRecord:
    return ReportRecord(
        rid, metric, value, bound, bool(passed), provenance, seed, time.time() - t0
    )


def _suite_entropy(seed: int, trials: int, tolerance: float) -> list:
    out = []
    t0 = time.time()
    cq = CqState(
        {
            "0": (0.5, DensityOperator([[1, 0], [0, 0]])),
            "1": (0.5, DensityOperator([[0.5, 0.5], [0.5, 0.5]])),
        }
    )
    br = pguess_cq(cq)
    want = 0.5 + 0.5 / math.sqrt(2.0)
    out.append(
        _rec("entropy/helstrom", "pguess(X|B)", br, want,
             abs(br.lo - want) <= tolerance, "exact", seed, t0)
    )
    t0 = time.time()
    rng = random.Random(seed)
    violations = 0
    n_inst = min(trials, 2000)
    for _ in range(n_inst):
        nx, nz = rng.randint(2, 4), rng.randint(2, 4)
        table = {}
        for x in range(nx):
            for b in range(2):
                for z in range(nz):
                    table[(x, b, z)] = rng.random()
        tot = sum(table.values())
        table = {k: v / tot for k, v in table.items()}
        if not check_chain_rule(table, tol=tolerance).holds:
            violations += 1
    out.append(
        _rec("entropy/chain-rule-fuzz", "violations", violations, 0,
             violations == 0, f"exhaustive({n_inst} instances)", seed, t0)
    )
    return out


def _suite_hash_audit(seed: int, trials: int, tolerance: float) -> list:
    from .hashing import (
        HashFamily,
        MacSpec,
        audit_strong_universality,
        audit_uniformity,
        audit_universality,
    )

    out = []
    t0 = time.time()
    fam = HashFamily("toeplitz-affine", 4, 2)
    eps = audit_universality(fam).epsilon
    out.append(
        _rec("hash/universality-toeplitz", "collision probability", eps, 0.25,
             eps <= 0.25 + 1e-15, "exhaustive", seed, t0)
    )
    t0 = time.time()
    spec = MacSpec(3, 3, eps_mac=2.0**-3)
    eps_mac = audit_strong_universality(spec).epsilon
    out.append(
        _rec("hash/strong-universality-gf", "eps_mac", eps_mac, 2.0**-3,
             abs(eps_mac - 2.0**-3) <= 1e-15, "exhaustive", seed, t0)
    )
    t0 = time.time()
    dev = audit_uniformity(fam)
    out.append(
        _rec("hash/uniformity-toeplitz", "max deviation from uniform", dev, 0.0,
             dev <= 1e-15, "exhaustive", seed, t0)
    )
    return out


def _default_pipeline():
    from .distill import EcParams, PaParams
    from .hashing import HashFamily, gf_multiply_extractor, toeplitz_extractor

    # phi = 0: the sketch only confirms equality, so honest aborts are
    # exactly the runs where the channel flipped at least one bit
    ec = EcParams(
        r=2,
        t=2,
        phi=0.0,
        sketch=toeplitz_extractor(6, 2),
        verif_family=HashFamily("gf-multiply-affine", 6, 2),
        eps_verif=0.25,
    )
    pa = PaParams(ext=toeplitz_extractor(6, 1), m=1, k=2.0)
    return ec, pa


def _suite_distill(seed: int, trials: int, tolerance: float) -> list:
    from .distill import (
        distill_pipeline,
        flip_tail_probability,
        make_noisy_correlated_source,
        pipeline_error_bound,
    )

    out = []
    ec, pa = _default_pipeline()
    source = make_noisy_correlated_source(6, 0.02, 6)
    t0 = time.time()
    n_runs = max(trials, 100)
    aborts = 0
    for i in range(n_runs):
        res = distill_pipeline(source, ec, pa, seed=seed * 1_000_003 + i)
        aborts += res.aborted
    rate = aborts / n_runs
    width = hoeffding_width(n_runs)
    bound = flip_tail_probability(6, 0.02, ec.phi)
    out.append(
        _rec("distill/abort-rate", "abort frequency", rate, bound + width,
             rate <= bound + width, f"monte-carlo({n_runs})", seed, t0)
    )
    t0 = time.time()
    eps_total = pipeline_error_bound(ec, pa)
    out.append(
        _rec("distill/error-budget", "eps_verif + eps_pa + 2 delta", eps_total,
             eps_total, True, "exact", seed, t0)
    )
    return out


def _default_fs_params():
    from .fsauth import FsParams
    from .hashing import MacSpec, toeplitz_extractor

    code = LinearCode([Bitstring.from_str("00"), Bitstring.from_str("11")])
    return FsParams(
        m=1,
        n=2,
        code=code,
        ss=toeplitz_extractor(2, 1),
        mac=MacSpec(4, 2, eps_mac=0.25),
        phi=0.0,
        k=1.0,
    )


def _suite_fsauth(seed: int, trials: int, tolerance: float) -> list:
    from .fsauth import (
        Cipher,
        ProductState,
        encrypt_with_x,
        honest_accept_rate,
        impersonation_accept_rate,
        run_attack,
        uniform_key_source,
        AttackStrategy,
    )

    out = []
    params = _default_fs_params()
    y = Bitstring.zeros(params.m)
    t0 = time.time()
    rate = honest_accept_rate(params, y)
    out.append(
        _rec("fsauth/honest-complete", "accept rate", rate, 1.0,
             rate == 1.0, "exhaustive", seed, t0)
    )
    t0 = time.time()
    forged = Cipher(
        y,
        Bitstring.zeros(params.m_ss),
        Bitstring.zeros(params.m_mac),
        ProductState(Bitstring.zeros(params.n), Bitstring.zeros(params.n)),
    )
    rate = impersonation_accept_rate(params, forged)
    bound = 2.0**-params.m_mac
    out.append(
        _rec("fsauth/impersonation", "accept rate", rate, bound,
             rate <= bound + 1e-12, "exhaustive", seed, t0)
    )
    t0 = time.time()
    n_runs = max(min(trials, 5000), 100)
    src = uniform_key_source(params)
    accepts = sum(
        run_attack(params, src, AttackStrategy("none"), seed=seed * 7 + i, y=y).decision
        for i in range(n_runs)
    )
    out.append(
        _rec("fsauth/honest-mc", "accept frequency", accepts / n_runs, 1.0,
             accepts == n_runs, f"monte-carlo({n_runs})", seed, t0)
    )
    return out


def _suite_bounds(seed: int, trials: int, tolerance: float) -> list:
    from .fsauth import eps_adv, eps_noise, key_replace

    out = []
    params = _default_fs_params()
    t0 = time.time()
    val = eps_adv(params, eps_mac=0.25, nu_ss=1.0, nu_mac=1.0)
    out.append(
        _rec("bounds/eps-adv", "closed form", val, val, val >= 0.25,
             "exact", seed, t0)
    )
    t0 = time.time()
    val = eps_noise(0.01, 0.02)
    out.append(
        _rec("bounds/eps-noise", "closed form", val, 0.03,
             abs(val - 0.03) <= 1e-15, "exact", seed, t0)
    )
    t0 = time.time()
    res = key_replace(Bitstring.zeros(3), Bitstring.zeros(3), k=3.0)
    out.append(
        _rec("bounds/key-replace", "k'", res.k_prime, 2.0,
             abs(res.k_prime - 2.0) <= 1e-12, "exact", seed, t0)
    )
    return out


def _suite_lemmas(seed: int, trials: int, tolerance: float) -> list:
    import numpy as np

    from .fsauth import check_guessing_lemmas

    out = []
    rng = random.Random(seed)
    nprng = np.random.default_rng(seed)

    def random_sub(dim):
        g = nprng.normal(size=(dim, dim)) + 1j * nprng.normal(size=(dim, dim))
        m = g @ g.conj().T
        m = m / m.trace().real * nprng.uniform(0.2, 1.0)
        return DensityOperator(m, check=False)

    t0 = time.time()
    n_pairs = min(max(trials, 100), 2000)
    violations = 0
    for _ in range(n_pairs):
        dim = rng.randint(2, 8)
        rho, sigma = random_sub(dim), random_sub(dim)
        dbar = generalized_trace_distance(rho, sigma)
        p = purified_distance(rho, sigma)
        if not (dbar <= p + 1e-9 and p <= math.sqrt(2 * dbar) + 1e-9):
            violations += 1
    out.append(
        _rec("lemmas/distance-chain", "violations", violations, 0,
             violations == 0, f"exhaustive({n_pairs} pairs)", seed, t0)
    )
    t0 = time.time()
    table = {}
    for x in range(3):
        for e in range(2):
            for z in range(2):
                table[(x, e, z)] = rng.random()
    tot = sum(table.values())
    table = {k: v / tot for k, v in table.items()}
    whole = ClassicalJoint(
        {(x, e): sum(table[(x, e, z)] for z in range(2)) for x in range(3) for e in range(2)}
    )
    branch = condition_on_event_classical(table, select=0)
    ok = hmin_classical(branch) >= hmin_classical(whole) - tolerance
    out.append(
        _rec("lemmas/event-conditioning", "Hmin(branch) >= Hmin(whole)",
             hmin_classical(branch), hmin_classical(whole), ok, "exact", seed, t0)
    )
    t0 = time.time()
    code = LinearCode([Bitstring.from_str("0"), Bitstring.from_str("1")])
    recs = check_guessing_lemmas(1, code, phi=0.0, tol=tolerance)
    bad = [r for r in recs if not r["holds"]]
    out.append(
        _rec("lemmas/guessing-games", "violations", len(bad), 0,
             not bad, f"exhaustive({len(recs)} instances)", seed, t0)
    )
    return out


_SUITE_FNS = {
    "entropy": _suite_entropy,
    "hash-audit": _suite_hash_audit,
    "distill": _suite_distill,
    "fsauth": _suite_fsauth,
    "bounds": _suite_bounds,
    "lemmas": _suite_lemmas,
}


@dataclass
class ExperimentConfig:
    suites: list
    seed: int = 0
    trials: int = 1000
    tolerance: float = 1e-6
    options: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        suites = doc.get("suites", list(SUITES))
        if isinstance(suites, str):
            suites = [suites]
        for s in suites:
            if s not in SUITES:
                raise ConfigError(f"unknown suite {s!r}")
        seed = doc.get("seed", 0)
        trials = doc.get("trials", 1000)
        tolerance = doc.get("tolerance", 1e-6)
        if not isinstance(seed, int) or not 0 <= seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if not isinstance(trials, int) or trials < 0:
            raise ConfigError("trials must be a nonnegative integer")
        if not isinstance(tolerance, (int, float)) or tolerance < 0:
            raise ConfigError("tolerance must be nonnegative")
        return cls(list(suites), seed, trials, float(tolerance),
                   doc.get("options", {}))


def run_experiment(config: ExperimentConfig) -> list:
    """Execute the named suites; deterministic in (suites, seed, trials)."""
    records = []
    for suite in config.suites:
        records.extend(
            _SUITE_FNS[suite](config.seed, config.trials, config.tolerance)
        )
    return sorted(records, key=lambda r: r.id)


def exit_code(records: Sequence[ReportRecord]) -> int:
    return 0 if all(r.passed for r in records) else 1
