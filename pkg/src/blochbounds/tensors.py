"""Correlation tensors of the generalized Bloch expansion.

Any N-party density matrix with common local dimension d expands as

    rho = (1/d^N) [ Id + sum_S sum_idx T^S[idx] * string(S, idx) ]

where S runs over nonempty party subsets, idx over generator index tuples
for the parties in S, and string(S, idx) places those generators at the
parties of S with identities elsewhere. The tensor entries are recovered by

    T^S[idx] = (d/2)^|S| * Tr[ rho * string(S, idx) ]

and are real for any Hermitian rho. Squared sector norms ||T^S||^2 feed the
purity identities and the entanglement bounds downstream.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .generators import GeneratorBasis, su_generators
from .linalg import (
    DensityMatrix,
    PartitionContext,
    ValidationError,
    check_mask,
    nonempty_masks,
    parties_from_mask,
    subset_size,
)

IMAG_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class CorrelationTensorSet:
    """Every sector tensor of one state, keyed by subset mask.

    ``sectors[mask]`` has one axis of length d^2 - 1 per party in the mask,
    ordered by ascending party label. ``norms_sq[mask]`` caches the squared
    Frobenius norm of that sector.
    """

    ctx: PartitionContext
    sectors: Mapping[int, np.ndarray]
    norms_sq: Mapping[int, float]

    def __post_init__(self):
        frozen = {}
        for mask, t in self.sectors.items():
            a = np.array(t, dtype=float)
            a.setflags(write=False)
            frozen[mask] = a
        object.__setattr__(self, "sectors", MappingProxyType(frozen))
        object.__setattr__(self, "norms_sq",
                           MappingProxyType(dict(self.norms_sq)))

    def norm_sq_by_size(self, size: int) -> float:
        """Sum of ||T^S||^2 over all subsets with |S| = size."""
        return sum(v for m, v in self.norms_sq.items() if subset_size(m) == size)

    def as_payload(self) -> list:
        """JSON-ready sector list with flattened entries."""
        out = []
        for mask in sorted(self.sectors):
            t = self.sectors[mask]
            out.append({
                "subset": list(parties_from_mask(mask)),
                "shape": list(t.shape),
                "entries": [float(x) for x in t.ravel()],
                "norm_sq": float(self.norms_sq[mask]),
            })
        return out


def correlation_tensor(rho: DensityMatrix, subset: int,
                       basis: GeneratorBasis | None = None,
                       imag_tol: float = IMAG_TOL) -> np.ndarray:
    """Tensor for one party subset, entries in generator-index order.

    Each entry is (d/2)^|S| Tr[rho * string]; an imaginary residue above
    ``imag_tol`` means the input was not Hermitian enough to have a real
    Bloch expansion, reported as a validation failure.
    """
    ctx = rho.ctx
    check_mask(subset, ctx)
    d = ctx.local_dim
    if basis is None:
        basis = su_generators(d)
    parties = parties_from_mask(subset)
    m = len(parties)
    scale = (d / 2.0) ** m
    n_gen = d * d - 1
    out = np.empty((n_gen,) * m)
    mat = rho.mat
    for idx in itertools.product(range(n_gen), repeat=m):
        string = _string(basis, parties, idx, ctx)
        val = complex(np.einsum("ij,ji->", mat, string)) * scale
        if abs(val.imag) > imag_tol:
            raise ValidationError(
                "tensor-reality", val.imag, imag_tol,
                f"entry {idx} of subset {list(parties)} has imaginary residue "
                f"{val.imag:.3g}; the state is not Hermitian")
        out[idx] = val.real
    return out


def _string(basis, parties, idx, ctx):
    # local kron chain; identical to generators.operator_string but skips
    # revalidating the assignment on every index tuple
    eye = np.eye(ctx.local_dim, dtype=complex)
    assigned = dict(zip(parties, idx))
    out = np.eye(1, dtype=complex)
    for pos in ctx.parties():
        factor = basis[assigned[pos]] if pos in assigned else eye
        out = np.kron(out, factor)
    return out


def all_tensors(rho: DensityMatrix,
                basis: GeneratorBasis | None = None,
                imag_tol: float = IMAG_TOL) -> CorrelationTensorSet:
    """Every sector tensor of ``rho``, smallest masks first."""
    ctx = rho.ctx
    if basis is None:
        basis = su_generators(ctx.local_dim)
    sectors = {}
    norms = {}
    for mask in nonempty_masks(ctx.n_parties):
        t = correlation_tensor(rho, mask, basis, imag_tol)
        sectors[mask] = t
        norms[mask] = float(np.dot(t.ravel(), t.ravel()))
    return CorrelationTensorSet(ctx, sectors, norms)


def purity_from_tensors(ts: CorrelationTensorSet) -> float:
    """Tr[rho^2] recovered from sector norms alone.

    d^(2N) Tr[rho^2] = d^N + sum_S 2^|S| d^(N - |S|) ||T^S||^2.
    """
    n, d = ts.ctx.n_parties, ts.ctx.local_dim
    acc = float(d ** n)
    for mask, norm_sq in ts.norms_sq.items():
        m = subset_size(mask)
        acc += (2 ** m) * (d ** (n - m)) * norm_sq
    return acc / d ** (2 * n)


def reduced_purity_from_tensors(ts: CorrelationTensorSet, subset: int) -> float:
    """Tr[rho_S^2] for a proper subset, from the sectors inside it.

    Works because tracing out parties leaves every tensor over a subset of
    the kept parties unchanged, so the full-state sectors already contain
    the reduction's expansion.
    """
    ctx = ts.ctx
    check_mask(subset, ctx, proper=True)
    d = ctx.local_dim
    m = subset_size(subset)
    acc = float(d ** m)
    sub = subset
    while sub:
        r = subset_size(sub)
        acc += (2 ** r) * (d ** (m - r)) * ts.norms_sq[sub]
        sub = (sub - 1) & subset
    return acc / d ** (2 * m)


def single_site_norm_identity(ts: CorrelationTensorSet) -> tuple:
    """Both sides of the pure-state constraint on single-party norms.

    For a pure state the single-party sector norms are fixed by the higher
    sectors:

        sum_{|S|=1} ||T^S||^2
            = (d^(2N) - d^N) / (2 d^(N-1))
              - sum_{l>=2} 2^l d^(N-l) / (2 d^(N-1)) * sum_{|S|=l} ||T^S||^2.

    Returns (lhs, rhs). The identity encodes Tr[rho^2] = 1 and generally
    fails on mixed states, which makes the gap a purity witness.
    """
    n, d = ts.ctx.n_parties, ts.ctx.local_dim
    lhs = ts.norm_sq_by_size(1)
    denom = 2.0 * d ** (n - 1)
    rhs = (d ** (2 * n) - d ** n) / denom
    for l in range(2, n + 1):
        rhs -= (2 ** l) * (d ** (n - l)) / denom * ts.norm_sq_by_size(l)
    return lhs, rhs
