"""Guessing probability, min-entropy brackets, smoothing, lemma checks."""

import math
import random

import numpy as np
import pytest

from cckit.entropy import (
    Bracket,
    ClassicalJoint,
    check_chain_rule,
    condition_on_event,
    condition_on_event_classical,
    hmin,
    hmin_classical,
    hmin_classical_bracket,
    hmin_smooth_classical,
    pguess_classical,
    pguess_cq,
)
from cckit.errors import InputError
from cckit.quantum import CqState, DensityOperator

KET0 = DensityOperator([[1, 0], [0, 0]])
KET1 = DensityOperator([[0, 0], [0, 1]])
PLUS = DensityOperator([[0.5, 0.5], [0.5, 0.5]])
MINUS = DensityOperator([[0.5, -0.5], [-0.5, 0.5]])


def qubit_pure(angle):
    v = np.array([math.cos(angle), math.sin(angle)])
    return DensityOperator.pure(v)


class TestBracket:
    def test_exact_width_enforced(self):
        with pytest.raises(InputError):
            Bracket(0.0, 0.1, "exact")

    def test_ordering_enforced(self):
        with pytest.raises(InputError):
            Bracket(1.0, 0.0, "primal-dual")

    def test_inf_sentinel(self):
        b = Bracket(math.inf, math.inf, "exact")
        assert math.isinf(b.lo)

    def test_json_roundtrip(self):
        for b in [Bracket.exact(0.25), Bracket(0.1, 0.9, "primal-dual"),
                  Bracket(math.inf, math.inf, "exact")]:
            back = Bracket.from_json(b.to_json())
            assert back == b


class TestClassicalJoint:
    def test_mass_cap(self):
        with pytest.raises(InputError):
            ClassicalJoint({("a", "e"): 0.7, ("b", "e"): 0.7})

    def test_negative_rejected(self):
        with pytest.raises(InputError):
            ClassicalJoint({("a", "e"): -0.1})

    def test_csv_roundtrip(self):
        j = ClassicalJoint({("0", "u"): 0.25, ("1", "u"): 0.5, ("0", "v"): 0.125})
        back = ClassicalJoint.from_csv(j.to_csv())
        assert back.table == j.table

    def test_marginal(self):
        j = ClassicalJoint({("0", "u"): 0.25, ("1", "u"): 0.25, ("0", "v"): 0.5})
        marg = j.marginal_e()
        assert math.isclose(marg["u"], 0.5)
        assert math.isclose(marg["v"], 0.5)


class TestPguessClassical:
    def test_uniform_independent(self):
        j = ClassicalJoint({(x, 0): 0.25 for x in range(4)})
        assert math.isclose(pguess_classical(j), 0.25)
        assert math.isclose(hmin_classical(j), 2.0)

    def test_fully_correlated(self):
        j = ClassicalJoint({(x, x): 0.25 for x in range(4)})
        assert math.isclose(pguess_classical(j), 1.0)
        assert hmin_classical(j) == 0.0

    def test_partial_leak(self):
        # e reveals the first bit of a 2-bit x
        j = ClassicalJoint({((a, b), a): 0.25 for a in (0, 1) for b in (0, 1)})
        assert math.isclose(pguess_classical(j), 0.5)
        assert math.isclose(hmin_classical(j), 1.0)

    def test_zero_mass_sentinel(self):
        b = hmin_classical_bracket(ClassicalJoint({}))
        assert math.isinf(b.lo) and math.isinf(b.hi)

    def test_subnormalized(self):
        j = ClassicalJoint({(0, 0): 0.25, (1, 0): 0.25})
        assert math.isclose(pguess_classical(j), 0.25)


class TestPguessCq:
    def test_empty_and_single(self):
        assert pguess_cq(CqState({})).lo == 0.0
        b = pguess_cq(CqState({0: (0.4, KET0)}))
        assert math.isclose(b.lo, 0.4) and b.width <= 1e-9

    def test_diagonal_matches_classical(self):
        cq = CqState({0: (0.5, KET0), 1: (0.5, DensityOperator([[0.25, 0], [0, 0.75]]))})
        b = pguess_cq(cq)
        # exact column-max: max(0.5, 0.125) + max(0, 0.375)
        assert math.isclose(b.lo, 0.875)
        assert b.method == "exact"

    def test_helstrom_orthogonal(self):
        b = pguess_cq(CqState({0: (0.5, KET0), 1: (0.5, KET1)}))
        assert math.isclose(b.lo, 1.0, abs_tol=1e-12)

    def test_helstrom_conjugate(self):
        b = pguess_cq(CqState({0: (0.5, KET0), 1: (0.5, PLUS)}))
        want = 0.5 * (1 + 1 / math.sqrt(2))
        assert math.isclose(b.lo, want, abs_tol=1e-9)
        assert b.method == "helstrom"

    def test_helstrom_vs_projective_grid(self):
        # brute-force over qubit projective measurements cannot beat Helstrom
        rng = random.Random(13)
        for _ in range(20):
            w0 = rng.uniform(0.1, 0.9)
            r0 = qubit_pure(rng.uniform(0, math.pi))
            r1 = qubit_pure(rng.uniform(0, math.pi))
            b = pguess_cq(CqState({0: (w0, r0), 1: (1 - w0, r1)}))
            best = 0.0
            for k in range(2000):
                a = math.pi * k / 2000
                v = np.array([math.cos(a), math.sin(a)])
                vp = np.array([-math.sin(a), math.cos(a)])
                succ = w0 * float(v @ r0.matrix.real @ v) + (1 - w0) * float(
                    vp @ r1.matrix.real @ vp
                )
                best = max(best, succ)
            assert best <= b.lo + 1e-9
            assert b.lo <= best + 1e-5  # fine grid nearly attains the optimum

    def test_primal_dual_trine(self):
        # three symmetric pure states, uniform prior: optimum is 2/3
        states = [qubit_pure(k * 2 * math.pi / 3) for k in range(3)]
        cq = CqState({k: (1 / 3, s) for k, s in enumerate(states)})
        b = pguess_cq(cq)
        assert b.method == "primal-dual"
        assert b.lo - 1e-9 <= 2 / 3 <= b.hi + 1e-9
        assert b.width <= 1e-4

    def test_primal_dual_bb84(self):
        states = {"00": KET0, "01": KET1, "10": PLUS, "11": MINUS}
        cq = CqState({k: (0.25, s) for k, s in states.items()})
        b = pguess_cq(cq)
        # one-qubit encoding of two bits: at most one bit can be read out
        assert b.hi <= 0.5 + 1e-6
        assert b.lo >= 0.25


class TestHmin:
    def test_orthogonal_zero_entropy(self):
        b = hmin(CqState({0: (0.5, KET0), 1: (0.5, KET1)}))
        assert math.isclose(b.hi, 0.0, abs_tol=1e-9)

    def test_no_side_information(self):
        mixed = DensityOperator.maximally_mixed(2)
        b = hmin(CqState({0: (0.5, mixed), 1: (0.5, mixed)}))
        assert math.isclose(b.lo, 1.0, abs_tol=1e-9)

    def test_zero_state(self):
        b = hmin(CqState({}))
        assert math.isinf(b.lo) and math.isinf(b.hi)


class TestSmoothing:
    def test_zero_delta_is_plain(self):
        j = ClassicalJoint({(x, 0): 0.25 for x in range(4)})
        b = hmin_smooth_classical(j, 0.0)
        assert math.isclose(b.lo, 2.0) and b.width <= 1e-9

    def test_deterministic_gains(self):
        j = ClassicalJoint({(0, 0): 1.0})
        b = hmin_smooth_classical(j, 0.2)
        # capping at 1 - delta^2 is feasible in purified distance
        assert b.lo >= -math.log2(1 - 0.2**2) - 1e-9
        assert b.lo > 0.0

    def test_monotone_in_delta(self):
        j = ClassicalJoint({(0, 0): 0.6, (1, 0): 0.3, (2, 0): 0.1})
        prev = -math.inf
        for delta in (0.0, 0.05, 0.1, 0.2, 0.4):
            lo = hmin_smooth_classical(j, delta).lo
            assert lo >= prev - 1e-9
            prev = lo

    def test_never_below_base(self):
        rng = random.Random(99)
        for _ in range(50):
            nx, ne = rng.randint(1, 5), rng.randint(1, 4)
            table = {
                (x, e): rng.random() for x in range(nx) for e in range(ne)
            }
            tot = sum(table.values())
            scale = rng.uniform(0.2, 1.0) / tot
            j = ClassicalJoint({k: v * scale for k, v in table.items()})
            delta = rng.uniform(0.0, 0.5)
            assert hmin_smooth_classical(j, delta).lo >= hmin_classical(j) - 1e-9

    def test_uniform_at_least_log_alphabet(self):
        j = ClassicalJoint({(x, 0): 1 / 8 for x in range(8)})
        b = hmin_smooth_classical(j, 0.1)
        assert b.lo >= 3.0 - 1e-9

    def test_delta_range(self):
        with pytest.raises(InputError):
            hmin_smooth_classical(ClassicalJoint({(0, 0): 1.0}), 1.0)


class TestChainRule:
    def test_binary_z_costs_at_most_one_bit(self):
        joint = {
            (0, 0, 0): 0.2, (0, 0, 1): 0.1,
            (1, 0, 0): 0.15, (1, 0, 1): 0.25,
            (0, 1, 0): 0.1, (1, 1, 1): 0.2,
        }
        rep = check_chain_rule(joint)
        assert rep.holds
        assert rep.lhs.lo >= rep.rhs.hi - 1.0 - 1e-9

    def test_fuzz(self):
        rng = random.Random(42)
        for _ in range(300):
            nx = rng.randint(1, 4)
            nb = rng.randint(1, 3)
            nz = rng.randint(1, 4)
            table = {}
            for x in range(nx):
                for b in range(nb):
                    for z in range(nz):
                        if rng.random() < 0.7:
                            table[(x, b, z)] = rng.random()
            if not table:
                continue
            tot = sum(table.values())
            table = {k: v / tot * rng.uniform(0.3, 1.0) for k, v in table.items()}
            assert check_chain_rule(table).holds

    def test_smooth_variant_runs(self):
        joint = {(x, 0, z): 1 / 8 for x in range(4) for z in range(2)}
        rep = check_chain_rule(joint, delta=0.1)
        assert rep.holds

    def test_key_shape(self):
        with pytest.raises(InputError):
            check_chain_rule({(0, 0): 1.0})


class TestEventConditioning:
    def test_classical_selects_branch(self):
        joint = {(0, 0, 0): 0.3, (1, 0, 0): 0.2, (0, 0, 1): 0.5}
        sel = condition_on_event_classical(joint, select=0)
        assert math.isclose(sel.mass, 0.5)
        assert sel.table == {(0, 0): 0.3, (1, 0): 0.2}

    def test_conditioning_never_lowers_entropy(self):
        rng = random.Random(7)
        for _ in range(200):
            table = {}
            for x in range(3):
                for e in range(3):
                    for z in (0, 1):
                        if rng.random() < 0.8:
                            table[(x, e, z)] = rng.random()
            if not table:
                continue
            tot = sum(table.values())
            table = {k: v / tot for k, v in table.items()}
            full = ClassicalJoint({(x, (e, z)): p for (x, e, z), p in table.items()})
            for z in (0, 1):
                branch = condition_on_event_classical(table, select=z)
                assert hmin_classical(branch) >= hmin_classical(full) - 1e-12

    def test_rejects_nonbinary_flag(self):
        with pytest.raises(InputError):
            condition_on_event_classical({(0, 0, 2): 1.0})

    def test_cq_version(self):
        cq = CqState({(0, 0): (0.3, KET0), (1, 0): (0.2, KET1), (0, 1): (0.5, PLUS)})
        sel = condition_on_event(cq, select=0)
        assert set(sel.branches) == {0, 1}
        assert math.isclose(sel.total_weight, 0.5)
        # guessing the symbol inside one branch is never harder
        assert pguess_cq(sel).hi <= pguess_cq(
            CqState({(x, z): wb for (x, z), wb in cq.branches.items()})
        ).hi + 1e-9

    def test_cq_requires_flagged_symbols(self):
        with pytest.raises(InputError):
            condition_on_event(CqState({0: (0.5, KET0)}))
