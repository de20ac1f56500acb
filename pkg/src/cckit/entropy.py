"""Min-entropy and guessing probability over classical and cq states.

Exact values where closed forms exist (classical side information,
binary alphabets via the Helstrom formula), certified [lo, hi] brackets
otherwise.  +infinity is represented by math.inf internally and by the
string "inf" in serialized output.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .quantum import CqState, DensityOperator, trace_norm

EXACT_WIDTH = 1e-9
DEFAULT_TOL = 1e-6
DEFAULT_ITER_CAP = 10_000


@dataclass(frozen=True)
class Bracket:
    """Certified numeric interval [lo, hi]."""

    lo: float
    hi: float
    method: str = "exact"

    def __post_init__(self):
        if math.isinf(self.lo) and math.isinf(self.hi):
            return  # the +inf sentinel (zero-mass convention)
        if self.lo > self.hi + 1e-12:
            raise InputError(f"bracket has lo {self.lo} > hi {self.hi}")
        if self.method == "exact" and self.hi - self.lo > EXACT_WIDTH:
            raise InputError("exact bracket wider than tolerance")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @classmethod
    def exact(cls, v: float) -> "Bracket":
        return cls(v, v, "exact")

    def to_json(self) -> str:
        def enc(v):
            return "inf" if math.isinf(v) else v

        return json.dumps({"lo": enc(self.lo), "hi": enc(self.hi), "method": self.method})

    @classmethod
    def from_json(cls, s: str) -> "Bracket":
        d = json.loads(s)

        def dec(v):
            return math.inf if v == "inf" else float(v)

        return cls(dec(d["lo"]), dec(d["hi"]), d["method"])


@dataclass
class ClassicalJoint:
    """Classical joint distribution over (x, e) pairs; total mass <= 1."""

    table: dict = field(default_factory=dict)

    def __post_init__(self):
        for k, p in self.table.items():
            if len(k) != 2:
                raise InputError("table keys must be (x, e) pairs")
            if p < -1e-15:
                raise InputError(f"negative probability for {k!r}")
        if self.mass > 1 + 1e-12:
            raise InputError(f"total mass {self.mass} exceeds 1")

    @property
    def mass(self) -> float:
        return sum(self.table.values())

    def x_values(self):
        return sorted({x for x, _ in self.table}, key=repr)

    def e_values(self):
        return sorted({e for _, e in self.table}, key=repr)

    def marginal_e(self) -> dict:
        out = {}
        for (_, e), p in self.table.items():
            out[e] = out.get(e, 0.0) + p
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["x", "e", "p"])
        for (x, e), p in sorted(self.table.items(), key=lambda kv: repr(kv[0])):
            w.writerow([x, e, repr(p)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ClassicalJoint":
        rows = list(csv.reader(io.StringIO(text)))
        table = {}
        for x, e, p in rows[1:]:
            table[(x, e)] = float(p)
        return cls(table)


def pguess_classical(p: ClassicalJoint) -> float:
    """Sum over e of the largest column entry; exact."""
    best = {}
    for (_, e), q in p.table.items():
        if q > best.get(e, 0.0):
            best[e] = q
    return sum(best.values())


def hmin_classical(p: ClassicalJoint) -> float:
    g = pguess_classical(p)
    return math.inf if g <= 0.0 else -math.log2(g)


# -- cq guessing probability --------------------------------------------


def _herm(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2


def _psd_clamp(m: np.ndarray) -> np.ndarray:
    ev, vecs = np.linalg.eigh(_herm(m))
    ev = np.clip(ev, 0.0, None)
    return (vecs * ev) @ vecs.conj().T


def _pinv_sqrt(m: np.ndarray) -> np.ndarray:
    ev, vecs = np.linalg.eigh(_herm(m))
    inv = np.where(ev > 1e-14, 1.0 / np.sqrt(np.clip(ev, 1e-300, None)), 0.0)
    return (vecs * inv) @ vecs.conj().T


def _is_diagonal(m: np.ndarray) -> bool:
    return np.abs(m - np.diag(np.diag(m))).max() < 1e-12


def _pguess_primal_dual(weighted, tol, iter_cap):
    """Bracket the discrimination SDP with a pretty-good-measurement primal
    and a spectral-shift dual, refined by alternating improvement."""
    d = weighted[0].shape[0]
    n = len(weighted)
    eye = np.eye(d, dtype=complex)

    total = sum(weighted)
    s_inv = _pinv_sqrt(total)
    povm = [_psd_clamp(s_inv @ r @ s_inv) for r in weighted]
    rest = eye - sum(povm)
    povm[int(np.argmax([r.trace().real for r in weighted]))] += _psd_clamp(rest)

    best_lo, best_hi = 0.0, float(sum(r.trace().real for r in weighted))
    for _ in range(iter_cap):
        lo = float(sum((g @ r).trace().real for g, r in zip(povm, weighted)))
        best_lo = max(best_lo, lo)
        y0 = _herm(sum(r @ g for g, r in zip(povm, weighted)))
        shift = max(
            max(float(np.linalg.eigvalsh(_herm(r) - y0).max()) for r in weighted), 0.0
        )
        best_hi = min(best_hi, float(y0.trace().real) + d * shift)
        if best_hi - best_lo <= tol:
            break
        lam = sum(r @ g @ r for g, r in zip(povm, weighted))
        l_inv = _pinv_sqrt(lam)
        povm = [_psd_clamp(l_inv @ r @ g @ r @ l_inv) for g, r in zip(povm, weighted)]
        rest = eye - sum(povm)
        povm[int(np.argmax([r.trace().real for r in weighted]))] += _psd_clamp(rest)
    best_hi = max(best_hi, best_lo)
    return Bracket(best_lo, best_hi, "primal-dual")


def pguess_cq(
    rho: CqState, tol: float = DEFAULT_TOL, iter_cap: int = DEFAULT_ITER_CAP
) -> Bracket:
    """Optimal probability of guessing the classical symbol from the side system.

    Exact for classical (diagonal) side information and for binary
    alphabets (Helstrom); otherwise a primal/dual bracket.
    """
    branches = [(w, r) for w, r in rho.branches.values() if w > 0.0]
    if not branches:
        return Bracket.exact(0.0)
    if len(branches) == 1:
        return Bracket.exact(branches[0][0])

    if all(_is_diagonal(r.matrix) for _, r in branches):
        d = branches[0][1].dim
        cols = np.array([w * np.real(np.diag(r.matrix)) for w, r in branches])
        return Bracket.exact(float(cols.max(axis=0).sum()))

    if len(branches) == 2:
        (w0, r0), (w1, r1) = branches
        diff = w0 * r0.matrix - w1 * r1.matrix
        val = 0.5 * (w0 + w1 + trace_norm(diff))
        return Bracket(val, val, "helstrom")

    weighted = [w * r.matrix for w, r in branches]
    return _pguess_primal_dual(weighted, tol, iter_cap)


def _neglog_bracket(p: Bracket) -> Bracket:
    lo = math.inf if p.hi <= 0.0 else -math.log2(p.hi)
    hi = math.inf if p.lo <= 0.0 else -math.log2(p.lo)
    return Bracket(lo, hi, p.method)


def hmin(rho: CqState, tol: float = DEFAULT_TOL, iter_cap: int = DEFAULT_ITER_CAP) -> Bracket:
    """-log2 of the guessing probability; +inf for the zero state."""
    return _neglog_bracket(pguess_cq(rho, tol, iter_cap))


def hmin_classical_bracket(p: ClassicalJoint) -> Bracket:
    return Bracket.exact(hmin_classical(p)) if p.mass > 0 else Bracket(math.inf, math.inf, "exact")


# -- smoothing (classical states only) ----------------------------------


def _purified_distance_diag(q: dict, p: dict) -> float:
    keys = set(q) | set(p)
    f = sum(math.sqrt(q.get(k, 0.0) * p.get(k, 0.0)) for k in keys)
    mq = sum(q.values())
    mp = sum(p.values())
    f += math.sqrt(max(0.0, 1 - mq) * max(0.0, 1 - mp))
    f = min(f, 1.0)
    return math.sqrt(max(0.0, 1 - f * f))


def _capped(table: dict, c: float) -> dict:
    return {k: min(v, c) for k, v in table.items()}


def _cap_pguess(table: dict, c: float) -> float:
    best = {}
    for (_, e), v in table.items():
        best[e] = max(best.get(e, 0.0), min(v, c))
    return sum(best.values())


def hmin_smooth_classical(
    p: ClassicalJoint, delta: float, search_iters: int = 60
) -> Bracket:
    """Lower-bound the delta-smooth min-entropy by capping the largest
    probabilities, subject to a purified-distance feasibility check.

    Considers both a capped-subnormalized and a capped-renormalized
    candidate and reports the better; no optimality is claimed.
    """
    if not 0.0 <= delta < 1.0:
        raise InputError(f"smoothing parameter {delta} outside [0, 1)")
    base = hmin_classical(p)
    if delta == 0.0 or not p.table or p.mass == 0.0:
        return Bracket.exact(base) if not math.isinf(base) else Bracket(math.inf, math.inf, "exact")

    cmax = max(p.table.values())

    def feasible_sub(c):
        return _purified_distance_diag(_capped(p.table, c), p.table) <= delta

    def feasible_ren(c):
        q = _capped(p.table, c)
        mq = sum(q.values())
        if mq <= 0:
            return False
        scale = p.mass / mq
        q = {k: v * scale for k, v in q.items()}
        return _purified_distance_diag(q, p.table) <= delta

    results = []
    for feasible, renorm in ((feasible_sub, False), (feasible_ren, True)):
        lo_c, hi_c = 0.0, cmax  # hi_c always feasible (cap inactive)
        for _ in range(search_iters):
            mid = (lo_c + hi_c) / 2
            if feasible(mid):
                hi_c = mid
            else:
                lo_c = mid

        def entropy_at(c):
            g = _cap_pguess(p.table, c)
            if renorm:
                mq = sum(_capped(p.table, c).values())
                g = g * p.mass / mq if mq > 0 else math.inf
            return math.inf if g <= 0 else -math.log2(g)

        lo = entropy_at(hi_c)
        slack = max(0.0, entropy_at(max(lo_c, 1e-300)) - lo)
        results.append((lo, slack))

    lo, slack = max(results, key=lambda t: t[0])
    lo = max(lo, base)  # capping never loses against the unsmoothed value
    return Bracket(lo, lo + slack, "primal-dual" if slack > EXACT_WIDTH else "exact")


# -- appendix-lemma checks ----------------------------------------------


@dataclass(frozen=True)
class LemmaReport:
    holds: bool
    lhs: Bracket
    rhs: Bracket
    detail: str = ""


def check_chain_rule(
    joint: dict, delta: float = 0.0, tol: float = 1e-9
) -> LemmaReport:
    """Conditioning on an extra classical register Z costs at most log2 |Z|.

    `joint` maps (x, b, z) triples to probabilities.
    """
    for k in joint:
        if len(k) != 3:
            raise InputError("chain-rule joint needs (x, b, z) keys")
    z_alpha = {z for (_, _, z) in joint}
    full = ClassicalJoint({(x, (b, z)): p for (x, b, z), p in joint.items()})
    coarse_table = {}
    for (x, b, _), p in joint.items():
        coarse_table[(x, b)] = coarse_table.get((x, b), 0.0) + p
    coarse = ClassicalJoint(coarse_table)
    lhs = hmin_smooth_classical(full, delta) if delta else hmin_classical_bracket(full)
    rhs = hmin_smooth_classical(coarse, delta) if delta else hmin_classical_bracket(coarse)
    bound = rhs.hi - math.log2(len(z_alpha)) if z_alpha else rhs.hi
    return LemmaReport(
        holds=lhs.lo >= bound - tol,
        lhs=lhs,
        rhs=rhs,
        detail=f"|Z|={len(z_alpha)}",
    )


def condition_on_event_classical(joint: dict, select=0) -> ClassicalJoint:
    """Select the subnormalized branch of a binary classical flag.

    `joint` maps (x, e, z) triples to probabilities; keeps z == select.
    """
    if not any(len(k) == 3 for k in joint):
        raise InputError("event conditioning needs (x, e, z) keys")
    flags = {z for (_, _, z) in joint}
    if not flags <= {0, 1}:
        raise InputError("flag register must be binary")
    return ClassicalJoint(
        {(x, e): p for (x, e, z), p in joint.items() if z == select}
    )


def condition_on_event(rho: CqState, select=0) -> CqState:
    """CqState version; branch symbols are (x, flag) tuples."""
    out = {}
    seen_flag = False
    for sym, (w, cond) in rho.branches.items():
        if not (isinstance(sym, tuple) and len(sym) == 2):
            raise InputError("branch symbols must be (x, flag) tuples")
        seen_flag = True
        if sym[1] == select:
            out[sym[0]] = (w, cond)
    if not seen_flag:
        raise InputError("no flag register present")
    return CqState(out)
