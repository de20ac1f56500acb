"""Conjugate-coding message authentication with key recycling.

Alice holds keys (l_ss, l_mac, theta), theta drawn from a code C.  She
picks x uniformly, sends the qubits H^theta |x> together with
y || s || t where s = ss(x, l_ss) and t = mac(x || y || s, l_mac).
Bob measures in the theta bases, recovers x' from (x~, s', l_ss),
checks w(x', x~) <= phi n and the tag, and recycles all three keys on
accept (only the hash keys on reject).

Product ciphers travel on a fast path (per-qubit basis/value pairs) so
robustness Monte Carlo needs no density matrices; arbitrary Kraus
attacks fall back to the dense engine.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .bitlinalg import (
    Bitstring,
    LinearCode,
    all_bitstrings,
    binary_entropy,
    hamming,
    hamming_ball,
)
from .entropy import Bracket, ClassicalJoint, pguess_classical, pguess_cq
from .errors import BudgetError, ConfigError, InputError
from .hashing import ExtractorSpec, MacSpec, hash_eval, mac_eval
from .quantum import (
    CqState,
    DensityOperator,
    KrausChannel,
    apply_channel,
    conjugate_code_state,
    conjugate_code_vector,
    measure_bb,
)

BOT = None


@dataclass(frozen=True)
class FsParams:
    """Protocol parameters; mac input length is always n + m + m_ss."""

    m: int  # message length
    n: int  # qubit count
    code: LinearCode
    ss: ExtractorSpec  # key-private hash onto m_ss bits
    mac: MacSpec
    phi: float
    k: float  # min-entropy rating of theta
    d_override: Optional[int] = None

    def __post_init__(self):
        if self.code.length != self.n:
            raise ConfigError(f"code length {self.code.length} != n = {self.n}")
        if self.ss.n != self.n:
            raise ConfigError(f"sketch input {self.ss.n} != n = {self.n}")
        if self.mac.n_mac != self.n + self.m + self.ss.m:
            raise ConfigError(
                f"mac input {self.mac.n_mac} != n + m + m_ss = "
                f"{self.n + self.m + self.ss.m}"
            )
        if not 0.0 <= self.phi <= 1.0:
            raise ConfigError(f"phi {self.phi} outside [0, 1]")

    @property
    def m_ss(self) -> int:
        return self.ss.m

    @property
    def m_mac(self) -> int:
        return self.mac.m_mac

    @property
    def r_ss(self) -> int:
        return self.ss.d + self.ss.m

    @property
    def r_mac(self) -> int:
        return self.mac.r_mac

    @property
    def d(self) -> int:
        if self.d_override is not None:
            return self.d_override
        if len(self.code) < 2:
            raise ConfigError("singleton code needs an explicit distance")
        return self.code.min_distance

    @property
    def radius(self) -> int:
        return math.floor(self.phi * self.n)


@dataclass(frozen=True)
class FsKeys:
    l_ss: Bitstring
    l_mac: Bitstring
    theta: Optional[Bitstring]  # BOT when consumed


def uniform_key_source(params: FsParams) -> Callable:
    """Uniform hash keys; theta uniform over the code."""

    def draw(rng: random.Random) -> FsKeys:
        l_ss = Bitstring(rng.getrandbits(1) for _ in range(params.r_ss))
        l_mac = Bitstring(rng.getrandbits(1) for _ in range(params.r_mac))
        theta = params.code.codewords[rng.randrange(len(params.code))]
        return FsKeys(l_ss, l_mac, theta)

    return draw


@dataclass(frozen=True)
class ProductState:
    """Fast path: qubit i is H^(bases_i) |bits_i>."""

    bits: Bitstring
    bases: Bitstring

    def density(self) -> DensityOperator:
        return conjugate_code_state(self.bits, self.bases)


@dataclass(frozen=True)
class Cipher:
    y: Bitstring
    s: Bitstring
    t: Bitstring
    quantum: object  # ProductState or DensityOperator

    def density(self) -> DensityOperator:
        if isinstance(self.quantum, ProductState):
            return self.quantum.density()
        return self.quantum


def _ss_eval(params: FsParams, l_ss: Bitstring, x: Bitstring) -> Bitstring:
    return hash_eval(params.ss.family, l_ss, x)


def _mac_msg(x: Bitstring, y: Bitstring, s: Bitstring) -> Bitstring:
    return x.concat(y).concat(s)


def fs_encrypt(params: FsParams, keys: FsKeys, y: Bitstring, seed: int) -> Cipher:
    if keys.theta is BOT:
        raise InputError("theta consumed: protocol not runnable")
    if len(y) != params.m:
        raise InputError(f"message length {len(y)} != {params.m}")
    rng = random.Random(seed)
    x = Bitstring(rng.getrandbits(1) for _ in range(params.n))
    return encrypt_with_x(params, keys, y, x)


def encrypt_with_x(
    params: FsParams, keys: FsKeys, y: Bitstring, x: Bitstring
) -> Cipher:
    """Deterministic core of fs_encrypt, exposed for exhaustive audits."""
    s = _ss_eval(params, keys.l_ss, x)
    t = mac_eval(params.mac, keys.l_mac, _mac_msg(x, y, s))
    return Cipher(y, s, t, ProductState(x, keys.theta))


def recover(
    params: FsParams, x_tilde: Bitstring, s: Bitstring, l_ss: Bitstring
) -> Optional[Bitstring]:
    """Nearest sketch match within radius phi*n, scanning outward by
    distance; a tie at the minimal distance fails."""
    best, best_w = None, -1
    for cand in hamming_ball(x_tilde, params.radius):
        w = hamming(cand, x_tilde)
        if best is not None and w > best_w:
            return best
        if _ss_eval(params, l_ss, cand) == s:
            if best is not None:
                return BOT  # tie at the same distance
            best, best_w = cand, w
    return best


def measurement_dist(state, theta: Bitstring) -> dict:
    """Bob's outcome law for measuring the cipher's quantum part in theta."""
    if isinstance(state, ProductState):
        mism = [i for i in range(len(theta)) if state.bases[i] != theta[i]]
        out = {}
        for pat in all_bitstrings(len(mism)):
            bits = list(state.bits)
            for pos, b in zip(mism, pat):
                bits[pos] = b
            out[Bitstring(bits)] = out.get(Bitstring(bits), 0.0) + 0.5 ** len(mism)
        return out
    return measure_bb(state, theta)


def _decide(
    params: FsParams, keys: FsKeys, cipher: Cipher, x_tilde: Bitstring
):
    """Deterministic accept/reject given the measurement outcome."""
    x_prime = recover(params, x_tilde, cipher.s, keys.l_ss)
    if x_prime is BOT:
        return False, BOT
    if hamming(x_prime, x_tilde) > params.radius:
        return False, BOT
    tag = mac_eval(params.mac, keys.l_mac, _mac_msg(x_prime, cipher.y, cipher.s))
    if tag != cipher.t:
        return False, BOT
    return True, cipher.y


@dataclass(frozen=True)
class DecryptResult:
    accept: bool
    y_out: Optional[Bitstring]
    recycled: FsKeys


def fs_decrypt(
    params: FsParams, keys: FsKeys, cipher: Cipher, seed: int = 0
) -> DecryptResult:
    if keys.theta is BOT:
        raise InputError("theta consumed: protocol not runnable")
    dist = measurement_dist(cipher.quantum, keys.theta)
    rng = random.Random(seed)
    u, acc = rng.random(), 0.0
    x_tilde = None
    for out, p in sorted(dist.items(), key=lambda kv: str(kv[0])):
        acc += p
        x_tilde = out
        if u < acc:
            break
    accept, y_out = _decide(params, keys, cipher, x_tilde)
    recycled = FsKeys(keys.l_ss, keys.l_mac, keys.theta if accept else BOT)
    return DecryptResult(accept, y_out, recycled)


# -- attack harness -----------------------------------------------------


@dataclass(frozen=True)
class CipherChannel:
    """Library substitution channel acting on the cipher in transit.

    kinds: identity | pauli (xpat/zpat flips) | measure-resend (in a
    guessed basis) | classical-tamper (xor deltas on y, s, t) | kraus
    (dense engine fallback).
    """

    kind: str
    xpat: Optional[Bitstring] = None
    zpat: Optional[Bitstring] = None
    basis: Optional[Bitstring] = None
    dy: Optional[Bitstring] = None
    ds: Optional[Bitstring] = None
    dt: Optional[Bitstring] = None
    kraus: Optional[KrausChannel] = None
    label: str = ""

    def _classical(self, cipher: Cipher):
        y = cipher.y ^ self.dy if self.dy is not None else cipher.y
        s = cipher.s ^ self.ds if self.ds is not None else cipher.s
        t = cipher.t ^ self.dt if self.dt is not None else cipher.t
        return y, s, t

    def branches(self, cipher: Cipher) -> list:
        """All channel outcomes: (prob, eve record, tampered cipher)."""
        y, s, t = self._classical(cipher)
        q = cipher.quantum
        if self.kind in ("identity", "classical-tamper"):
            return [(1.0, (), Cipher(y, s, t, q))]
        if self.kind == "pauli":
            if not isinstance(q, ProductState):
                raise InputError("pauli fast path needs a product state")
            # X flips the value in the computational basis, Z in the
            # Hadamard basis; the other action is a phase Bob cannot see
            flips = Bitstring(
                self.zpat[i] if q.bases[i] else self.xpat[i]
                for i in range(len(q.bits))
            )
            return [(1.0, (), Cipher(y, s, t, ProductState(q.bits ^ flips, q.bases)))]
        if self.kind == "measure-resend":
            if not isinstance(q, ProductState):
                raise InputError("measure-resend fast path needs a product state")
            mism = [i for i in range(len(q.bits)) if q.bases[i] != self.basis[i]]
            out = []
            for pat in all_bitstrings(len(mism)):
                bits = list(q.bits)
                for pos, b in zip(mism, pat):
                    bits[pos] = b
                a = Bitstring(bits)
                out.append(
                    (
                        0.5 ** len(mism),
                        (str(a),),
                        Cipher(y, s, t, ProductState(a, self.basis)),
                    )
                )
            return out
        if self.kind == "kraus":
            rho = apply_channel(self.kraus, cipher.density())
            return [(1.0, (), Cipher(y, s, t, rho))]
        raise InputError(f"unknown channel kind {self.kind!r}")


def pauli_library(n: int) -> list:
    """All n-qubit Pauli strings as CipherChannels (phases dropped)."""
    out = []
    for xp in all_bitstrings(n):
        for zp in all_bitstrings(n):
            name = "".join(
                "IXZY"[2 * z + x_] for x_, z in zip(xp, zp)
            )
            out.append(CipherChannel("pauli", xpat=xp, zpat=zp, label=f"pauli-{name}"))
    return out


def standard_attack_library(params: FsParams) -> list:
    """Identity, all Pauli substitutions, measure-resend in both uniform
    bases, tag tampering, syndrome tampering."""
    n = params.n
    lib = [CipherChannel("identity", label="identity")]
    lib += pauli_library(n)
    lib.append(
        CipherChannel("measure-resend", basis=Bitstring.zeros(n), label="mr-comp")
    )
    lib.append(
        CipherChannel("measure-resend", basis=Bitstring((1,) * n), label="mr-hadamard")
    )
    if params.m_mac:
        dt = Bitstring.from_int(1, params.m_mac)
        lib.append(CipherChannel("classical-tamper", dt=dt, label="tag-tamper"))
    if params.m_ss:
        ds = Bitstring.from_int(1, params.m_ss)
        lib.append(CipherChannel("classical-tamper", ds=ds, label="synd-tamper"))
    return lib


@dataclass(frozen=True)
class AttackStrategy:
    """none | noise (flip pattern in the encoding bases) | substitution
    (a CipherChannel) | impersonation (forge without seeing a cipher)."""

    kind: str
    pattern: Optional[Bitstring] = None
    channel: Optional[CipherChannel] = None
    forge: Optional[Callable] = None  # (rng, params) -> Cipher

    def __post_init__(self):
        if self.kind not in ("none", "noise", "substitution", "impersonation"):
            raise InputError(f"unknown attack kind {self.kind!r}")


@dataclass
class FsTranscript:
    strategy: str
    decision: Optional[bool] = None
    y_out: Optional[Bitstring] = None
    recycled: Optional[FsKeys] = None
    events: list = field(default_factory=list)

    def add(self, label: str, value) -> None:
        self.events.append((label, value))

    @property
    def eve_view(self) -> list:
        """Everything visible at Eve's interface; never the hash keys or,
        on reject, theta."""
        return [ev for ev in self.events if ev[0] != "keys"]

    def to_json(self) -> str:
        def enc(v):
            if isinstance(v, Bitstring):
                return str(v)
            if v is BOT:
                return "bot"
            if isinstance(v, (tuple, list)):
                return [enc(u) for u in v]
            return str(v) if not isinstance(v, (bool, int, float, str)) else v

        return json.dumps(
            {
                "strategy": self.strategy,
                "decision": self.decision,
                "events": [[lab, enc(v)] for lab, v in self.events],
            }
        )


def run_attack(
    params: FsParams,
    key_source: Callable,
    strategy: AttackStrategy,
    seed: int,
    y: Optional[Bitstring] = None,
) -> FsTranscript:
    """One protocol session under the given attack; deterministic in seed."""
    rng = random.Random(seed)
    keys = key_source(rng)
    y = y if y is not None else Bitstring.zeros(params.m)
    tr = FsTranscript(strategy.kind)
    tr.add("keys", keys)

    if strategy.kind == "impersonation":
        # Eve forges before Alice sends anything
        forged = strategy.forge(rng, params)
        tr.add("forged-cipher", (forged.y, forged.s, forged.t))
        res = fs_decrypt(params, keys, forged, seed=rng.getrandbits(32))
        tr.decision, tr.y_out, tr.recycled = res.accept, res.y_out, res.recycled
        tr.add("decision", res.accept)
        return tr

    cipher = fs_encrypt(params, keys, y, seed=rng.getrandbits(32))
    tr.add("cipher-classical", (cipher.y, cipher.s, cipher.t))

    if strategy.kind == "noise":
        q = cipher.quantum
        cipher = Cipher(
            cipher.y, cipher.s, cipher.t, ProductState(q.bits ^ strategy.pattern, q.bases)
        )
    elif strategy.kind == "substitution":
        branches = strategy.channel.branches(cipher)
        u, acc = rng.random(), 0.0
        record, cipher = (), cipher
        for p, rec, tampered in branches:
            acc += p
            record, cipher = rec, tampered
            if u < acc:
                break
        tr.add("eve-record", record)
        tr.add("tampered-classical", (cipher.y, cipher.s, cipher.t))

    res = fs_decrypt(params, keys, cipher, seed=rng.getrandbits(32))
    tr.decision, tr.y_out, tr.recycled = res.accept, res.y_out, res.recycled
    tr.add("decision", res.accept)
    return tr


# -- exhaustive audits --------------------------------------------------


def _key_spaces(params: FsParams):
    return list(all_bitstrings(params.r_ss)), list(all_bitstrings(params.r_mac))


def honest_accept_rate(params: FsParams, y: Bitstring) -> float:
    """Exact accept probability of noise-free runs, exhaustive over keys
    and x; 1.0 for a sound configuration."""
    ss_keys, mac_keys = _key_spaces(params)
    total, hits = 0, 0
    for theta in params.code:
        keys0 = [FsKeys(a, b, theta) for a in ss_keys for b in mac_keys]
        for keys in keys0:
            for x in all_bitstrings(params.n):
                cipher = encrypt_with_x(params, keys, y, x)
                accept, y_out = _decide(params, keys, cipher, x)
                hits += accept and y_out == y
                total += 1
    return hits / total


def noise_reject_rate(params: FsParams, y: Bitstring, pattern: Bitstring) -> float:
    """Exact reject probability under a fixed flip pattern of weight
    <= phi*n, exhaustive over keys and x."""
    ss_keys, mac_keys = _key_spaces(params)
    total, rejects = 0, 0
    for theta in params.code:
        for a in ss_keys:
            for b in mac_keys:
                keys = FsKeys(a, b, theta)
                for x in all_bitstrings(params.n):
                    cipher = encrypt_with_x(params, keys, y, x)
                    accept, _ = _decide(params, keys, cipher, x ^ pattern)
                    rejects += not accept
                    total += 1
    return rejects / total


def impersonation_accept_rate(params: FsParams, forged: Cipher) -> float:
    """Exact accept probability of a fixed forged cipher over uniform keys
    and Bob's measurement randomness."""
    ss_keys, mac_keys = _key_spaces(params)
    total_w = 0.0
    acc_w = 0.0
    for theta in params.code:
        dist = measurement_dist(forged.quantum, theta)
        for a in ss_keys:
            for b in mac_keys:
                keys = FsKeys(a, b, theta)
                for x_tilde, p in dist.items():
                    if p == 0.0:
                        continue
                    accept, _ = _decide(params, keys, forged, x_tilde)
                    acc_w += p * accept
                    total_w += p
    return acc_w / total_w


def recycled_key_entropy(
    params: FsParams,
    channels: Sequence[CipherChannel],
    y: Bitstring,
    theta_probs: Optional[dict] = None,
    budget: int = 2**28,
) -> dict:
    """Exact Hmin of theta on the accept branch, conditioned on the full
    adversary view (cipher, tampering records, decision), per channel.

    The hash keys are excluded from the view: they stay secret and are
    recycled.  Returns {channel label: Bracket}.
    """
    if theta_probs is None:
        theta_probs = {th: 1.0 / len(params.code) for th in params.code}
    ss_keys, mac_keys = _key_spaces(params)
    work = len(theta_probs) * len(ss_keys) * len(mac_keys) * (1 << params.n)
    if work * max(len(channels), 1) > budget:
        raise BudgetError(work * len(channels), budget)

    out = {}
    p_key = 1.0 / (len(ss_keys) * len(mac_keys) * (1 << params.n))
    for ch in channels:
        joint = {}
        for theta, p_th in theta_probs.items():
            for a in ss_keys:
                for b in mac_keys:
                    keys = FsKeys(a, b, theta)
                    for x in all_bitstrings(params.n):
                        cipher = encrypt_with_x(params, keys, y, x)
                        sent = (str(cipher.y), str(cipher.s), str(cipher.t))
                        for p_br, rec, tampered in ch.branches(cipher):
                            dist = measurement_dist(tampered.quantum, theta)
                            for x_tilde, p_m in dist.items():
                                if p_m == 0.0:
                                    continue
                                accept, _ = _decide(params, keys, tampered, x_tilde)
                                if not accept:
                                    continue
                                view = (
                                    sent,
                                    (str(tampered.y), str(tampered.s), str(tampered.t)),
                                    rec,
                                )
                                kk = (theta, view)
                                joint[kk] = joint.get(kk, 0.0) + (
                                    p_th * p_key * p_br * p_m
                                )
        cj = ClassicalJoint(joint)
        if cj.mass == 0.0:
            out[ch.label or ch.kind] = Bracket(math.inf, math.inf, "exact")
        else:
            g = pguess_classical(cj)
            out[ch.label or ch.kind] = Bracket.exact(-math.log2(g))
    return out


# -- closed-form bounds -------------------------------------------------


def eps_noise(channel_eps: float, eps_ss: float) -> float:
    return channel_eps + eps_ss


def eps_adv(
    params: FsParams,
    eps_mac: float,
    nu_ss: float,
    nu_mac: float,
) -> float:
    """The adversarial construction error of the authentication scheme."""
    c = len(params.code)
    inner = (
        2.0
        + c / 2.0 ** (params.d / 2.0)
        + c * 2.0 ** (binary_entropy(params.phi) * params.n) / 2.0**params.d
    )
    return eps_mac + (nu_ss + nu_mac) * math.sqrt(
        inner * 2.0 ** (params.m_ss + params.m_mac - params.k)
    )


@dataclass(frozen=True)
class KeyReplaceResult:
    spare: Optional[Bitstring]
    theta_out: Bitstring
    k_prime: float


def key_replace(
    k_new: Bitstring, theta: Optional[Bitstring], k: float
) -> KeyReplaceResult:
    """Swap in the fresh key when theta was consumed; the output key is
    rated k' = -log2(2^-n + 2^-k) either way."""
    n = len(k_new)
    k_prime = -math.log2(2.0**-n + 2.0**-k)
    if theta is BOT:
        return KeyReplaceResult(BOT, k_new, k_prime)
    return KeyReplaceResult(k_new, theta, k_prime)


# -- guessing games -----------------------------------------------------


def _measure_first_factor(rho: np.ndarray, n: int, theta: Bitstring) -> dict:
    """Measure the leading 2^n factor in the theta bases; returns
    {x: subnormalized operator on the rest}."""
    dim = rho.shape[0]
    rest = dim // (1 << n)
    t = rho.reshape(1 << n, rest, 1 << n, rest)
    out = {}
    for x in all_bitstrings(n):
        v = conjugate_code_vector(x, theta)
        out[x] = np.einsum("a,aibj,b->ij", v.conj(), t, v)
    return out


def guessing_game_one(
    rho_theta_e: CqState, channel: KrausChannel, n: int, code: LinearCode
) -> tuple:
    """sigma = measure A per Theta after the channel E -> AB; returns
    (pguess(X|B) bracket, pguess(Theta|E) bracket, bound factor)."""
    d = code.min_distance if len(code) >= 2 else n
    factor = 1.0 + len(code) / 2.0 ** (d / 2.0)
    branches = {}
    for theta, (w, rho_e) in rho_theta_e.branches.items():
        if w == 0.0:
            continue
        ab = apply_channel(channel, rho_e)
        for x, op in _measure_first_factor(ab.matrix, n, theta).items():
            branches[x] = branches.get(x, 0.0) + w * op
    cq = {}
    for x, op in branches.items():
        wt = float(op.trace().real)
        if wt > 1e-15:
            cq[x] = (wt, DensityOperator(op / wt, check=False))
    lhs = pguess_cq(CqState(cq))
    rhs = pguess_cq(rho_theta_e)
    return lhs, rhs, factor


def guessing_game_two(
    rho_theta_e: CqState,
    channel: KrausChannel,
    n: int,
    code: LinearCode,
    phi: float,
) -> tuple:
    """Three-player variant: channel E -> ABC, measure A and B per Theta,
    project on w(X, X') <= phi*n; guess X from (Theta, C)."""
    d = code.min_distance if len(code) >= 2 else n
    factor = 1.0 + len(code) * 2.0 ** (binary_entropy(phi) * n) / 2.0**d
    radius = math.floor(phi * n)
    branches = {}
    for theta, (w, rho_e) in rho_theta_e.branches.items():
        if w == 0.0:
            continue
        abc = apply_channel(channel, rho_e)
        for x, op_bc in _measure_first_factor(abc.matrix, n, theta).items():
            for xp, op_c in _measure_first_factor(op_bc, n, theta).items():
                if hamming(x, xp) > radius:
                    continue
                key = (x, theta)
                branches[key] = branches.get(key, 0.0) + w * op_c
    cq = {}
    for (x, theta), op in branches.items():
        wt = float(op.trace().real)
        if wt > 1e-15:
            # Theta is classical side information: tag it onto the symbol
            # of a block-diagonal embedding by indexing the conditional
            cq[(x, theta)] = (wt, DensityOperator(op / wt, check=False))
    # condition on (Theta, C): group by x, embed theta classically
    thetas = sorted({th for (_, th) in cq}, key=str)
    dim_c = 1
    for op in branches.values():
        dim_c = op.shape[0]
        break
    grouped = {}
    for (x, theta), (wt, cond) in cq.items():
        blk = np.zeros((len(thetas) * dim_c, len(thetas) * dim_c), dtype=complex)
        i = thetas.index(theta)
        blk[i * dim_c : (i + 1) * dim_c, i * dim_c : (i + 1) * dim_c] = cond.matrix
        if x in grouped:
            w0, m0 = grouped[x]
            grouped[x] = (w0 + wt, m0 + wt * blk)
        else:
            grouped[x] = (wt, wt * blk)
    cq2 = {
        x: (w, DensityOperator(mat / w, check=False)) for x, (w, mat) in grouped.items()
    }
    lhs = pguess_cq(CqState(cq2))
    rhs = pguess_cq(rho_theta_e)
    return lhs, rhs, factor


def check_guessing_lemmas(
    n: int, code: LinearCode, phi: float = 0.0, tol: float = 1e-6
) -> list:
    """Run both corollaries over a small channel library; returns a list
    of dict records with the conservative pass flag."""
    if n > 2:
        raise InputError("guessing-lemma checks are sized for n <= 2")
    uniform = CqState(
        {th: (1.0 / len(code), DensityOperator.maximally_mixed(1)) for th in code}
    )
    # a correlated prior: first codeword more likely
    tilted = CqState(
        {
            th: (
                (0.75 if i == 0 else 0.25 / max(len(code) - 1, 1)),
                DensityOperator.maximally_mixed(1),
            )
            for i, th in enumerate(code.codewords)
        }
    )
    dim_a = 1 << n
    records = []

    def prep(vec):
        v = np.asarray(vec, dtype=complex).reshape(-1, 1)
        return KrausChannel([v])  # E is trivial (dim 1): prepare a fixed pure state

    # channel library for game one: E -> A (x) B with B = n qubits
    epr = np.zeros(dim_a * dim_a, dtype=complex)
    for i in range(dim_a):
        epr[i * dim_a + i] = 1.0 / math.sqrt(dim_a)
    lib_one = {
        "epr": prep(epr),
        "product-zero": prep(
            np.kron(
                conjugate_code_vector(Bitstring.zeros(n), Bitstring.zeros(n)),
                conjugate_code_vector(Bitstring.zeros(n), Bitstring.zeros(n)),
            )
        ),
        "product-plus": prep(
            np.kron(
                conjugate_code_vector(Bitstring.zeros(n), Bitstring((1,) * n)),
                conjugate_code_vector(Bitstring.zeros(n), Bitstring.zeros(n)),
            )
        ),
    }
    for label, ch in lib_one.items():
        for prior_label, prior in (("uniform", uniform), ("tilted", tilted)):
            lhs, rhs, factor = guessing_game_one(prior, ch, n, code)
            records.append(
                {
                    "lemma": "guessing-one",
                    "channel": label,
                    "prior": prior_label,
                    "lhs": lhs,
                    "rhs": rhs,
                    "factor": factor,
                    "holds": lhs.hi <= rhs.lo * factor + tol,
                }
            )
    # game two: E -> A (x) B (x) C with C trivial (dim 1)
    ghz_like = np.zeros(dim_a * dim_a, dtype=complex)
    for i in range(dim_a):
        ghz_like[i * dim_a + i] = 1.0 / math.sqrt(dim_a)
    lib_two = {
        "epr-pair-shared": prep(ghz_like),
        "identical-zeros": prep(
            np.kron(
                conjugate_code_vector(Bitstring.zeros(n), Bitstring.zeros(n)),
                conjugate_code_vector(Bitstring.zeros(n), Bitstring.zeros(n)),
            )
        ),
    }
    for label, ch in lib_two.items():
        for prior_label, prior in (("uniform", uniform), ("tilted", tilted)):
            lhs, rhs, factor = guessing_game_two(prior, ch, n, code, phi)
            records.append(
                {
                    "lemma": "guessing-two",
                    "channel": label,
                    "prior": prior_label,
                    "lhs": lhs,
                    "rhs": rhs,
                    "factor": factor,
                    "holds": lhs.hi <= rhs.lo * factor + tol,
                }
            )
    return records
