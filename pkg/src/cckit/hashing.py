"""Auditable hash families, strongly universal MACs, and strong extractors.

Two concrete constructions, both linear in the first input:

  toeplitz-affine     h(x, z || b) = trunc_m(T(z) x) xor b, T an n-by-n
                      Toeplitz matrix from a (2n - 1)-bit seed
  gf-multiply-affine  h(x, y || b) = trunc_m(x * y) xor b in GF(2^n)

The linear part (offset dropped) is the extractor Ext(x, z); the affine
family is the key-private hash h(x, l1 || l2) = Ext(x, l1) xor l2.
Every claimed constant (collision probability, strong universality,
extractor error, key privacy) is audited exhaustively, never assumed.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, replace
from functools import lru_cache

from .bitlinalg import (
    Bitstring,
    all_bitstrings,
    gf2_matvec,
    gf_mul_int,
    irreducible_polynomial,
    toeplitz_from_seed,
)
from .entropy import ClassicalJoint, hmin_classical
from .errors import BudgetError, InputError

DEFAULT_BUDGET = 2**26

KINDS = ("toeplitz-affine", "gf-multiply-affine", "composed", "constant")


@dataclass(frozen=True)
class HashFamily:
    """Keyed family {0,1}^n -> {0,1}^m; key = linear seed (d bits) || offset."""

    kind: str
    n: int
    m: int
    parts: tuple = ()  # linear sub-extractor pair for kind "composed"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown family kind {self.kind!r}")
        if self.n < 0 or self.m < 0:
            raise InputError("negative lengths")
        if self.kind == "composed" and len(self.parts) != 2:
            raise InputError("composed family needs exactly two parts")

    @property
    def d(self) -> int:
        """Seed length of the linear part."""
        if self.kind == "toeplitz-affine":
            return 2 * self.n - 1 if self.n else 0
        if self.kind == "gf-multiply-affine":
            return self.n
        if self.kind == "composed":
            return sum(p.d for p in self.parts)
        return 0  # constant: key is ignored

    @property
    def r(self) -> int:
        """Total key length: linear seed plus m-bit affine offset."""
        return self.d + self.m

    @property
    def linear(self) -> bool:
        return self.kind != "constant"

    def lin_eval(self, seed: Bitstring, x: Bitstring) -> Bitstring:
        """The extractor part Ext(x, seed); offset dropped."""
        if len(x) != self.n:
            raise InputError(f"input length {len(x)} != {self.n}")
        if len(seed) != self.d:
            raise InputError(f"seed length {len(seed)} != {self.d}")
        if self.kind == "toeplitz-affine":
            full = gf2_matvec(toeplitz_from_seed(seed, self.n, self.n), x)
            return full[: self.m]
        if self.kind == "gf-multiply-affine":
            mod = irreducible_polynomial(self.n)
            prod = gf_mul_int(x.to_int(), seed.to_int(), mod)
            return Bitstring.from_int(prod, self.n)[: self.m]
        if self.kind == "composed":
            e1, e2 = self.parts
            out1 = e1.family.lin_eval(seed[: e1.d], x)
            out2 = e2.family.lin_eval(seed[e1.d :], x)
            return out1.concat(out2)
        return Bitstring.zeros(self.m)

    def to_json(self, nu: float | None = None) -> str:
        doc = {"kind": self.kind, "n": self.n, "m": self.m, "r": self.r}
        if nu is not None:
            doc["nu"] = nu
        return json.dumps(doc)


@lru_cache(maxsize=1 << 20)
def hash_eval(family: HashFamily, key: Bitstring, x: Bitstring) -> Bitstring:
    if len(key) != family.r:
        raise InputError(f"key length {len(key)} != {family.r}")
    return family.lin_eval(key[: family.d], x) ^ key[family.d :]


def _check_budget(required: int, budget: int):
    if required > budget:
        raise BudgetError(required, budget)


@dataclass(frozen=True)
class AuditResult:
    epsilon: float
    witness: tuple

    def to_json(self) -> str:
        return json.dumps({"epsilon": self.epsilon, "witness": [str(w) for w in self.witness]})


def audit_universality(family: HashFamily, budget: int = DEFAULT_BUDGET) -> AuditResult:
    """Exact maximum collision probability over distinct input pairs."""
    _check_budget((1 << family.r) * (1 << (2 * family.n)), budget)
    keys = list(all_bitstrings(family.r))
    tables = {x: [hash_eval(family, k, x) for k in keys] for x in all_bitstrings(family.n)}
    best, witness = 0.0, ()
    for x1, x2 in itertools.combinations(tables, 2):
        coll = sum(a == b for a, b in zip(tables[x1], tables[x2])) / len(keys)
        if coll > best:
            best, witness = coll, (x1, x2)
    return AuditResult(best, witness)


def audit_linearity(family: HashFamily, budget: int = DEFAULT_BUDGET) -> bool:
    """eval(k, a xor b) = eval(k, a) xor eval(k, b) xor eval(k, 0), all keys."""
    _check_budget((1 << family.r) * (1 << (2 * family.n)), budget)
    zero = Bitstring.zeros(family.n)
    for k in all_bitstrings(family.r):
        e0 = hash_eval(family, k, zero)
        evals = {a: hash_eval(family, k, a) for a in all_bitstrings(family.n)}
        for a, b in itertools.combinations_with_replacement(evals, 2):
            if evals[a ^ b] != evals[a] ^ evals[b] ^ e0:
                return False
    return True


def audit_uniformity(family: HashFamily, budget: int = DEFAULT_BUDGET) -> float:
    """Max deviation of the key-averaged output law from uniform, over all x."""
    _check_budget((1 << family.r) * (1 << family.n), budget)
    keys = list(all_bitstrings(family.r))
    worst = 0.0
    target = 1.0 / (1 << family.m)
    for x in all_bitstrings(family.n):
        counts = {}
        for k in keys:
            t = hash_eval(family, k, x)
            counts[t] = counts.get(t, 0) + 1
        dev = max(
            abs(counts.get(t, 0) / len(keys) - target) for t in all_bitstrings(family.m)
        )
        worst = max(worst, dev)
    return worst


# -- MACs ---------------------------------------------------------------


@dataclass(frozen=True)
class MacSpec:
    """GF-multiply MAC: tag = trunc(x * y) xor b, key = y || b."""

    n_mac: int
    m_mac: int
    eps_mac: float
    kind: str = "gf-multiply-affine"

    def __post_init__(self):
        if self.m_mac > self.n_mac:
            raise InputError("tag longer than message")
        if self.kind not in ("gf-multiply-affine", "constant"):
            raise InputError(f"unsupported mac kind {self.kind!r}")

    @property
    def r_mac(self) -> int:
        return self.family.r

    @property
    def family(self) -> HashFamily:
        return HashFamily(self.kind, self.n_mac, self.m_mac)

    @property
    def nu_mac(self) -> float:
        # strongly universal families have nu = 1
        return 1.0


def mac_eval(spec: MacSpec, key: Bitstring, msg: Bitstring) -> Bitstring:
    if len(key) != spec.r_mac:
        raise InputError(f"mac key length {len(key)} != {spec.r_mac}")
    if len(msg) != spec.n_mac:
        raise InputError(f"mac message length {len(msg)} != {spec.n_mac}")
    return hash_eval(spec.family, key, msg)


def audit_strong_universality(spec: MacSpec, budget: int = DEFAULT_BUDGET) -> AuditResult:
    """Exact max over x1 != x2, t1, t2 of the joint tag probability,
    reported as eps_mac after multiplying by 2^m_mac."""
    _check_budget((1 << spec.r_mac) * (1 << (2 * spec.n_mac)), budget)
    keys = list(all_bitstrings(spec.r_mac))
    tables = {
        x: [mac_eval(spec, k, x) for k in keys] for x in all_bitstrings(spec.n_mac)
    }
    best, witness = 0.0, ()
    for x1, x2 in itertools.combinations(tables, 2):
        joint = {}
        for t1, t2 in zip(tables[x1], tables[x2]):
            joint[(t1, t2)] = joint.get((t1, t2), 0) + 1
        (t1, t2), cnt = max(joint.items(), key=lambda kv: kv[1])
        p = cnt / len(keys)
        if p > best:
            best, witness = p, (x1, x2, t1, t2)
    return AuditResult(best * (1 << spec.m_mac), witness)


# -- extractors ---------------------------------------------------------


@dataclass(frozen=True)
class ExtractorSpec:
    """Strong extractor Ext(x, z) with family constant nu; the claimed
    error at min-entropy k is eps(k) = (nu / 2) sqrt(2^(m - k))."""

    family: HashFamily
    nu: float = 1.0
    rating: tuple | None = None  # optional (k, eps) pair

    @property
    def n(self) -> int:
        return self.family.n

    @property
    def m(self) -> int:
        return self.family.m

    @property
    def d(self) -> int:
        return self.family.d

    def eps_at(self, k: float) -> float:
        return (self.nu / 2.0) * math.sqrt(2.0 ** (self.m - k))

    def rated(self, k: float) -> "ExtractorSpec":
        return replace(self, rating=(k, self.eps_at(k)))

    def to_json(self) -> str:
        doc = json.loads(self.family.to_json(self.nu))
        doc["d"] = self.d
        if self.rating is not None:
            doc["rating"] = {"k": self.rating[0], "eps": self.rating[1]}
        return json.dumps(doc)


def toeplitz_extractor(n: int, m: int, nu: float = 1.0) -> ExtractorSpec:
    return ExtractorSpec(HashFamily("toeplitz-affine", n, m), nu)


def gf_multiply_extractor(n: int, m: int, nu: float = 1.0) -> ExtractorSpec:
    return ExtractorSpec(HashFamily("gf-multiply-affine", n, m), nu)


@lru_cache(maxsize=1 << 20)
def ext_eval(spec: ExtractorSpec, x: Bitstring, seed: Bitstring) -> Bitstring:
    return spec.family.lin_eval(seed, x)


def measure_extractor_distance(
    spec: ExtractorSpec, source: ClassicalJoint, budget: int = DEFAULT_BUDGET
) -> float:
    """Exact trace distance of (Ext(X,Z), Z, E) from uniform (x) uniform (x)
    the E marginal, enumerating the full uniform seed."""
    _check_budget((1 << spec.d) * max(len(source.table), 1), budget)
    n_seeds = 1 << spec.d
    n_keys = 1 << spec.m
    joint = {}
    for z in all_bitstrings(spec.d):
        for (x, e), p in source.table.items():
            key = (ext_eval(spec, x, z), z, e)
            joint[key] = joint.get(key, 0.0) + p / n_seeds
    marg_e = source.marginal_e()
    total = 0.0
    for kbits in all_bitstrings(spec.m):
        for z in all_bitstrings(spec.d):
            for e, pe in marg_e.items():
                ideal = pe / (n_seeds * n_keys)
                total += abs(joint.get((kbits, z, e), 0.0) - ideal)
    return 0.5 * total


def lift_to_subnormalized(spec: ExtractorSpec) -> ExtractorSpec:
    """(k, eps) rating becomes (k + 1, 2 eps), valid on subnormalized states."""
    if spec.rating is None:
        raise InputError("lift needs a rated extractor")
    k, eps = spec.rating
    return replace(spec, rating=(k + 1, 2 * eps))


def compose_extractors(e1: ExtractorSpec, e2: ExtractorSpec) -> ExtractorSpec:
    """Concatenate outputs and seeds; errors add.

    e1 rated (k, eps1), e2 must be rated at k - m1; the composition is a
    (k, eps1 + eps2) extractor.
    """
    if e1.rating is None or e2.rating is None:
        raise InputError("composition needs rated extractors")
    if e1.n != e2.n:
        raise InputError("input lengths differ")
    k1, eps1 = e1.rating
    k2, eps2 = e2.rating
    if abs(k2 - (k1 - e1.m)) > 1e-12:
        raise InputError(f"second extractor must be rated at k - m1 = {k1 - e1.m}")
    fam = HashFamily("composed", e1.n, e1.m + e2.m, parts=(e1, e2))
    return ExtractorSpec(fam, e1.nu + e2.nu, rating=(k1, eps1 + eps2))


# -- key privacy --------------------------------------------------------


def key_private_hash(spec: ExtractorSpec) -> HashFamily:
    """The affine family h(x, l1 || l2) = Ext(x, l1) xor l2; uniform by
    construction and nu-key-private."""
    return spec.family


@dataclass(frozen=True)
class KeyPrivacyAudit:
    lhs: float
    bound: float
    hmin_x_given_te: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.bound + 1e-12


def audit_key_privacy(
    spec: ExtractorSpec,
    source: ClassicalJoint,
    nu: float | None = None,
    budget: int = DEFAULT_BUDGET,
) -> KeyPrivacyAudit:
    """Check || rho_LTE - tau_L (x) rho_TE ||_1 <= nu sqrt(2^(m - Hmin(X|TE)))
    on a classical instance with L uniform and independent of (X, E)."""
    fam = spec.family
    _check_budget((1 << fam.r) * max(len(source.table), 1), budget)
    nu = spec.nu if nu is None else nu
    n_keys = 1 << fam.r
    joint = {}  # (l, t, e) -> p
    for ell in all_bitstrings(fam.r):
        for (x, e), p in source.table.items():
            t = hash_eval(fam, ell, x)
            joint[(ell, t, e)] = joint.get((ell, t, e), 0.0) + p / n_keys
    te = {}
    for (_, t, e), p in joint.items():
        te[(t, e)] = te.get((t, e), 0.0) + p
    lhs = 0.0
    for ell in all_bitstrings(fam.r):
        for (t, e), pte in te.items():
            lhs += abs(joint.get((ell, t, e), 0.0) - pte / n_keys)
    # Hmin(X | T, E) on the key-averaged joint
    xte = {}
    for ell in all_bitstrings(fam.r):
        for (x, e), p in source.table.items():
            t = hash_eval(fam, ell, x)
            kk = (x, (t, e))
            xte[kk] = xte.get(kk, 0.0) + p / n_keys
    hk = hmin_classical(ClassicalJoint(xte))
    bound = nu * math.sqrt(2.0 ** (fam.m - hk))
    return KeyPrivacyAudit(lhs, bound, hk)
