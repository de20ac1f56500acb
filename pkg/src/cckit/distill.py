"""Key distillation: secure-sketch error correction, hash verification,
privacy amplification, and their composition.

Every stage leaks its public material (keys, syndrome, tag, decision,
seed) into an append-only transcript that the adversary reads in full;
the authentic channel never tampers.  The abort symbol is None and
propagates: Bob's input is forced to bottom whenever Alice's is.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Optional

from .bitlinalg import Bitstring, hamming, hamming_ball
from .entropy import ClassicalJoint
from .errors import ConfigError, InputError
from .hashing import (
    ExtractorSpec,
    HashFamily,
    audit_universality,
    ext_eval,
    hash_eval,
)

BOT = None  # abort symbol


@dataclass(frozen=True)
class EcParams:
    """Error-correction stage parameters: r-bit sketch, t-bit verification."""

    r: int
    t: int
    phi: float
    sketch: ExtractorSpec  # linear hash onto r bits, keyed by its seed
    verif_family: HashFamily  # onto t bits
    eps_verif: float

    def __post_init__(self):
        if self.sketch.m != self.r:
            raise ConfigError(f"sketch output {self.sketch.m} != r = {self.r}")
        if self.verif_family.m != self.t:
            raise ConfigError(f"verif output {self.verif_family.m} != t = {self.t}")
        if not 0.0 <= self.phi <= 1.0:
            raise ConfigError(f"phi {self.phi} outside [0, 1]")

    @property
    def n(self) -> int:
        return self.sketch.n

    def audit(self) -> None:
        got = audit_universality(self.verif_family).epsilon
        if got > self.eps_verif + 1e-12:
            raise ConfigError(
                f"verif family collides with probability {got} > {self.eps_verif}"
            )


@dataclass(frozen=True)
class PaParams:
    """Privacy-amplification stage: extract m bits at rated min-entropy k."""

    ext: ExtractorSpec
    m: int
    k: float
    delta: float = 0.0

    def __post_init__(self):
        if self.ext.m != self.m:
            raise ConfigError(f"extractor output {self.ext.m} != m = {self.m}")

    @property
    def eps_pa(self) -> float:
        return self.ext.eps_at(self.k)


def synd(x: Bitstring, key: Bitstring, ec: EcParams) -> Bitstring:
    """The r-bit sketch sent over the authentic channel."""
    return ext_eval(ec.sketch, x, key)


def corr(
    y: Bitstring, s: Bitstring, key: Bitstring, ec: EcParams
) -> Optional[Bitstring]:
    """Search the Hamming ball of radius phi*n around y for the unique
    member whose sketch matches s; None on no match or ambiguity."""
    radius = math.floor(ec.phi * len(y))
    found = None
    for cand in hamming_ball(y, radius):
        if synd(cand, key, ec) == s:
            if found is not None:
                return BOT  # ambiguous
            found = cand
    return found


@dataclass
class PipelineTranscript:
    """Everything the authentic channel leaks, in event order."""

    events: list = field(default_factory=list)
    decision: Optional[bool] = None

    def add(self, label: str, value) -> None:
        self.events.append((label, value))

    def get(self, label: str):
        for lab, v in self.events:
            if lab == label:
                return v
        return None

    def to_json(self) -> str:
        def enc(v):
            if isinstance(v, Bitstring):
                return str(v)
            if v is BOT:
                return "bot"
            return v

        return json.dumps(
            {
                "decision": self.decision,
                "events": [[lab, enc(v)] for lab, v in self.events],
            }
        )


def run_corr(
    x: Optional[Bitstring],
    y: Optional[Bitstring],
    ec: EcParams,
    sketch_key: Bitstring,
    transcript: PipelineTranscript,
):
    """Alice sends (key, sketch); Bob recovers an estimate or aborts."""
    if x is BOT:
        return BOT, BOT
    transcript.add("sketch-key", sketch_key)
    s = synd(x, sketch_key, ec)
    transcript.add("syndrome", s)
    xhat = corr(y, s, sketch_key, ec) if y is not BOT else BOT
    return x, xhat


def run_verif(
    x: Optional[Bitstring],
    xhat: Optional[Bitstring],
    ec: EcParams,
    verif_key: Bitstring,
    transcript: PipelineTranscript,
) -> bool:
    """Alice sends (f, f(x)); Bob accepts iff his estimate agrees."""
    if x is BOT:
        transcript.decision = False
        transcript.add("decision", False)
        return False
    transcript.add("verif-key", verif_key)
    tag = hash_eval(ec.verif_family, verif_key, x)
    transcript.add("verif-tag", tag)
    accept = xhat is not BOT and hash_eval(ec.verif_family, verif_key, xhat) == tag
    transcript.decision = accept
    transcript.add("decision", accept)
    return accept


def run_pa(
    x: Bitstring, pa: PaParams, pa_seed: Bitstring, transcript: PipelineTranscript
) -> Bitstring:
    transcript.add("pa-seed", pa_seed)
    return ext_eval(pa.ext, x, pa_seed)


# -- source models ------------------------------------------------------


@dataclass(frozen=True)
class SourceModel:
    """Emits (x, y, e) triples or bottom; rated Hmin^delta(X|E) >= k."""

    kind: str
    n: int
    k: float
    delta: float
    sample: Callable  # random.Random -> (x, y, e) or BOT
    joint: Optional[ClassicalJoint] = None  # (x, e) law, when enumerable

    def __post_init__(self):
        if self.kind not in ("classical-joint", "noisy-correlated", "adversarial-plugin"):
            raise ConfigError(f"unknown source kind {self.kind!r}")


def make_noisy_correlated_source(
    n: int, flip_rate: float, k: int, delta: float = 0.0
) -> SourceModel:
    """X uniform, Y = X with i.i.d. flips, E = the first n - k bits of X."""
    if not 0 <= k <= n:
        raise ConfigError(f"rating k = {k} infeasible for n = {n}")
    if not 0.0 <= flip_rate <= 1.0:
        raise ConfigError(f"flip rate {flip_rate} outside [0, 1]")
    leak = n - k

    def sample(rng: random.Random):
        x = Bitstring(rng.getrandbits(1) for _ in range(n))
        y = Bitstring(b ^ (1 if rng.random() < flip_rate else 0) for b in x)
        return x, y, str(x[:leak])

    joint = ClassicalJoint(
        {}
    )
    if n <= 16:
        from .bitlinalg import all_bitstrings

        joint = ClassicalJoint(
            {(x, str(x[:leak])): 1.0 / (1 << n) for x in all_bitstrings(n)}
        )
    return SourceModel("noisy-correlated", n, float(k), delta, sample, joint)


def make_classical_joint_source(
    table: dict, n: int, k: float, delta: float = 0.0
) -> SourceModel:
    """Explicit law over ((x, y), e) triples with declared rating."""
    total = sum(table.values())
    if total > 1 + 1e-12:
        raise ConfigError("source law has mass above 1")

    items = sorted(table.items(), key=lambda kv: repr(kv[0]))

    def sample(rng: random.Random):
        u = rng.random()
        acc = 0.0
        for ((x, y), e), p in items:
            acc += p
            if u < acc:
                return x, y, e
        return BOT  # residual mass aborts

    xe = {}
    for ((x, _), e), p in items:
        xe[(x, e)] = xe.get((x, e), 0.0) + p
    return SourceModel("classical-joint", n, k, delta, sample, ClassicalJoint(xe))


def flip_tail_probability(n: int, flip_rate: float, phi: float) -> float:
    """Pr[more than phi*n i.i.d. flips], exact binomial tail."""
    limit = math.floor(phi * n)
    return sum(
        math.comb(n, w) * flip_rate**w * (1 - flip_rate) ** (n - w)
        for w in range(limit + 1, n + 1)
    )


# -- the composed pipeline ----------------------------------------------


@dataclass
class PipelineResult:
    key_alice: Optional[Bitstring]
    key_bob: Optional[Bitstring]
    transcript: PipelineTranscript

    @property
    def aborted(self) -> bool:
        return self.key_alice is BOT


def distill_pipeline(
    source: SourceModel, ec: EcParams, pa: PaParams, seed: int
) -> PipelineResult:
    """corr, then verif, then pa; abort propagates; deterministic in seed."""
    if abs(pa.k - (source.k - ec.r - ec.t)) > 1e-9:
        raise ConfigError(
            f"entropy budget: pa.k = {pa.k} != source.k - r - t = "
            f"{source.k - ec.r - ec.t}"
        )
    rng = random.Random(seed)
    transcript = PipelineTranscript()
    out = source.sample(rng)
    if out is BOT:
        transcript.decision = False
        transcript.add("decision", False)
        return PipelineResult(BOT, BOT, transcript)
    x, y, _e = out
    sketch_key = Bitstring(rng.getrandbits(1) for _ in range(ec.sketch.d))
    x, xhat = run_corr(x, y, ec, sketch_key, transcript)
    verif_key = Bitstring(rng.getrandbits(1) for _ in range(ec.verif_family.r))
    accept = run_verif(x, xhat, ec, verif_key, transcript)
    if not accept:
        return PipelineResult(BOT, BOT, transcript)
    pa_seed = Bitstring(rng.getrandbits(1) for _ in range(pa.ext.d))
    k_a = run_pa(x, pa, pa_seed, transcript)
    k_b = ext_eval(pa.ext, xhat, pa_seed)
    return PipelineResult(k_a, k_b, transcript)


def pipeline_error_bound(ec: EcParams, pa: PaParams) -> float:
    """Composed construction error: eps_verif + eps_pa + 2 delta."""
    return ec.eps_verif + pa.eps_pa + 2 * pa.delta


def summary_csv_rows(results) -> list:
    rows = [["run", "decision", "key_alice", "key_bob"]]
    for i, res in enumerate(results):
        rows.append(
            [
                str(i),
                "accept" if not res.aborted else "abort",
                str(res.key_alice) if res.key_alice is not BOT else "bot",
                str(res.key_bob) if res.key_bob is not BOT else "bot",
            ]
        )
    return rows
