"""Finite-dimensional density-operator engine.

Subnormalized positive operators, classical-quantum ensembles,
conjugate-coding states, basis-switched measurements, channels, partial
trace and the distance zoo (trace / generalized trace / purified
distance).  All stochastic behaviour lives elsewhere; everything here is
a pure function of its arguments.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .bitlinalg import Bitstring, all_bitstrings
from .errors import InputError

HERMITICITY_TOL = 1e-10
EIG_CLAMP = 1e-10
DIMENSION_CAP = 2**10

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_KET0 = np.array([1, 0], dtype=complex)
_KET1 = np.array([0, 1], dtype=complex)


class DensityOperator:
    """A subnormalized positive operator: Hermitian, PSD, 0 <= trace <= 1."""

    __slots__ = ("dim", "matrix")

    def __init__(self, matrix, check: bool = True):
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InputError("density operator must be a square matrix")
        if m.shape[0] > DIMENSION_CAP:
            raise InputError(f"dimension {m.shape[0]} exceeds cap {DIMENSION_CAP}")
        if check:
            if np.abs(m - m.conj().T).max() > HERMITICITY_TOL:
                raise InputError("matrix is not Hermitian within tolerance")
            ev = np.linalg.eigvalsh(m)
            if ev.min() < -EIG_CLAMP:
                raise InputError(f"matrix has negative eigenvalue {ev.min()}")
            tr = float(m.trace().real)
            if not -EIG_CLAMP <= tr <= 1 + EIG_CLAMP:
                raise InputError(f"trace {tr} outside [0, 1]")
        self.matrix = m
        self.dim = m.shape[0]

    @classmethod
    def pure(cls, vec) -> "DensityOperator":
        v = np.asarray(vec, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()), check=False)

    @classmethod
    def zero(cls, dim: int) -> "DensityOperator":
        return cls(np.zeros((dim, dim), dtype=complex), check=False)

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityOperator":
        return cls(np.eye(dim, dtype=complex) / dim, check=False)

    @property
    def trace(self) -> float:
        return float(self.matrix.trace().real)

    def scaled(self, w: float) -> "DensityOperator":
        return DensityOperator(self.matrix * w, check=False)

    def tensor(self, other: "DensityOperator") -> "DensityOperator":
        return DensityOperator(np.kron(self.matrix, other.matrix), check=False)

    def to_json(self) -> str:
        """Debug dump: row-major array of [re, im] pairs."""
        rows = [
            [[float(z.real), float(z.imag)] for z in row] for row in self.matrix
        ]
        return json.dumps({"dim": self.dim, "matrix": rows})

    def __repr__(self) -> str:
        return f"DensityOperator(dim={self.dim}, trace={self.trace:.6g})"


@dataclass(frozen=True)
class CqState:
    """Classical-quantum ensemble: symbol -> (weight, normalized conditional)."""

    branches: Mapping[object, tuple]

    def __post_init__(self):
        total = 0.0
        dims = set()
        for sym, (w, rho) in self.branches.items():
            if w < -1e-12:
                raise InputError(f"negative weight for symbol {sym!r}")
            if w > 1e-12 and abs(rho.trace - 1.0) > 1e-8:
                raise InputError(f"conditional for {sym!r} is not normalized")
            total += w
            dims.add(rho.dim)
        if total > 1 + 1e-9:
            raise InputError(f"total weight {total} exceeds 1")
        if len(dims) > 1:
            raise InputError("conditionals have mismatched dimensions")

    @property
    def total_weight(self) -> float:
        return sum(w for w, _ in self.branches.values())

    @property
    def side_dim(self) -> int:
        for _, rho in self.branches.values():
            return rho.dim
        return 1

    def joint_operator(self) -> DensityOperator:
        """Block-diagonal embedding sum_x w_x |x><x| (x) rho_x."""
        syms = list(self.branches)
        d = self.side_dim
        out = np.zeros((len(syms) * d, len(syms) * d), dtype=complex)
        for i, sym in enumerate(syms):
            w, rho = self.branches[sym]
            out[i * d : (i + 1) * d, i * d : (i + 1) * d] = w * rho.matrix
        return DensityOperator(out, check=False)


class KrausChannel:
    """A completely positive map given by Kraus operators; may be trace-reducing."""

    def __init__(self, operators: Sequence):
        ops = [np.asarray(k, dtype=complex) for k in operators]
        if not ops:
            raise InputError("channel needs at least one Kraus operator")
        d_in = ops[0].shape[1]
        d_out = ops[0].shape[0]
        if any(k.shape != (d_out, d_in) for k in ops):
            raise InputError("Kraus operators have mismatched shapes")
        total = sum(k.conj().T @ k for k in ops)
        ev = np.linalg.eigvalsh(total)
        if ev.max() > 1 + 1e-8:
            raise InputError("sum K^dag K exceeds identity")
        self.operators = ops
        self.dim_in = d_in
        self.dim_out = d_out
        self.trace_preserving = bool(
            np.abs(total - np.eye(d_in)).max() < 1e-8
        )

    @classmethod
    def identity(cls, dim: int) -> "KrausChannel":
        return cls([np.eye(dim, dtype=complex)])


def apply_channel(ch: KrausChannel, rho: DensityOperator) -> DensityOperator:
    if ch.dim_in != rho.dim:
        raise InputError(f"channel input dim {ch.dim_in} != state dim {rho.dim}")
    out = sum(k @ rho.matrix @ k.conj().T for k in ch.operators)
    return DensityOperator(out, check=False)


# -- conjugate coding ---------------------------------------------------


def _qubit_codeword(x: int, theta: int) -> np.ndarray:
    v = _KET1 if x else _KET0
    return _H @ v if theta else v


def conjugate_code_vector(x: Bitstring, theta: Bitstring) -> np.ndarray:
    if len(x) != len(theta):
        raise InputError("data and basis strings differ in length")
    v = np.array([1.0 + 0j])
    for xi, ti in zip(x, theta):
        v = np.kron(v, _qubit_codeword(xi, ti))
    return v


def conjugate_code_state(x: Bitstring, theta: Bitstring) -> DensityOperator:
    """Pure product state with each bit encoded in the basis chosen by theta."""
    if 2 ** len(x) > DIMENSION_CAP:
        raise InputError(f"{len(x)} qubits exceed the dense-engine cap")
    return DensityOperator.pure(conjugate_code_vector(x, theta))


def measure_bb(rho: DensityOperator, theta: Bitstring) -> dict:
    """Measure every qubit in the basis chosen by theta.

    Returns {outcome: weight}; the weights sum to the trace of the input.
    """
    n = len(theta)
    if rho.dim != 2**n:
        raise InputError(f"state dim {rho.dim} != 2^{n}")
    out = {}
    for x in all_bitstrings(n):
        v = conjugate_code_vector(x, theta)
        w = float(np.real(v.conj() @ rho.matrix @ v))
        out[x] = max(w, 0.0)
    return out


def measure_bb_post(rho: DensityOperator, theta: Bitstring) -> dict:
    """As measure_bb, but also returns the normalized post-measurement states."""
    n = len(theta)
    if rho.dim != 2**n:
        raise InputError(f"state dim {rho.dim} != 2^{n}")
    out = {}
    for x in all_bitstrings(n):
        v = conjugate_code_vector(x, theta)
        w = float(np.real(v.conj() @ rho.matrix @ v))
        out[x] = (max(w, 0.0), DensityOperator.pure(v))
    return out


# -- distances ----------------------------------------------------------


def _clamped_eigh(m: np.ndarray) -> tuple:
    ev, vecs = np.linalg.eigh(m)
    return np.where(ev < 0, np.where(ev > -EIG_CLAMP, 0.0, ev), ev), vecs


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    ev, vecs = _clamped_eigh(m)
    ev = np.clip(ev, 0.0, None)
    return (vecs * np.sqrt(ev)) @ vecs.conj().T


def trace_norm(m: np.ndarray) -> float:
    ev = np.linalg.eigvalsh((m + m.conj().T) / 2)
    return float(np.abs(ev).sum())


def trace_distance(rho: DensityOperator, sigma: DensityOperator) -> float:
    if rho.dim != sigma.dim:
        raise InputError("trace distance needs equal dimensions")
    return 0.5 * trace_norm(rho.matrix - sigma.matrix)


def generalized_trace_distance(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Trace distance plus half the trace gap, for subnormalized inputs."""
    return trace_distance(rho, sigma) + 0.5 * abs(rho.trace - sigma.trace)


def fidelity(rho: DensityOperator, sigma: DensityOperator) -> float:
    if rho.dim != sigma.dim:
        raise InputError("fidelity needs equal dimensions")
    # tr sqrt(sqrt(rho) sigma sqrt(rho)) = nuclear norm of sqrt(rho) sqrt(sigma),
    # which is much better conditioned near rank deficiency
    prod = psd_sqrt(rho.matrix) @ psd_sqrt(sigma.matrix)
    return float(np.linalg.svd(prod, compute_uv=False).sum())


def generalized_fidelity(rho: DensityOperator, sigma: DensityOperator) -> float:
    extra = math.sqrt(max(0.0, (1 - rho.trace)) * max(0.0, (1 - sigma.trace)))
    return fidelity(rho, sigma) + extra


def purified_distance(rho: DensityOperator, sigma: DensityOperator) -> float:
    f = min(generalized_fidelity(rho, sigma), 1.0)
    return math.sqrt(max(0.0, 1.0 - f * f))


def partial_trace(
    rho: DensityOperator, keep: Sequence[bool], dims: Sequence[int]
) -> DensityOperator:
    """Trace out the factors whose keep flag is False."""
    dims = list(dims)
    if len(keep) != len(dims):
        raise InputError("keep mask and factor list differ in length")
    if math.prod(dims) != rho.dim:
        raise InputError("factor dimensions do not multiply to the state dimension")
    t = rho.matrix.reshape(dims + dims)
    n = len(dims)
    for i in reversed(range(n)):
        if not keep[i]:
            t = np.trace(t, axis1=i, axis2=i + n)
            n -= 1
    d = math.prod(d for d, k in zip(dims, keep) if k)
    return DensityOperator(t.reshape(d, d), check=False)
