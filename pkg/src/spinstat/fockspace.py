"""Concrete Fock-space machinery.

Occupation bases per statistics grade, exact ladder-operator action with
bosonic sqrt factors or fermionic parity signs, sparse matrices of symbolic
operator expressions, product-of-creation bracket states, and the
first-quantized cross-checks (permanents, determinants, symmetrizers) that
everything else is verified against.

Bases and matrices are immutable once built; functions are pure, so matrix
assembly can be partitioned by column with no shared state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, combinations_with_replacement, permutations

import numpy as np
import scipy.sparse as sp

from .modes import ModeSpace, kron_delta
from .opalgebra import LadderOp, OperatorExpr, check_sigma

DEFAULT_DIMENSION_CAP = 2_000_000


class DimensionCapError(ValueError):
    """A requested sector exceeds the configured basis-size cap."""


def sector_dimension(n_modes: int, n_particles: int, sigma: int) -> int:
    """Closed-form sector size: C(M, N) for sigma=-1, C(M+N-1, N) for sigma=+1."""
    check_sigma(sigma)
    if n_particles < 0:
        raise ValueError("particle number must be >= 0")
    if sigma == -1:
        return math.comb(n_modes, n_particles) if n_particles <= n_modes else 0
    return math.comb(n_modes + n_particles - 1, n_particles)


@dataclass(frozen=True, eq=False)
class FockBasis:
    """Every occupation vector of one (N, sigma) sector, in a fixed order.

    States are enumerated as combinations (sigma=-1) or multisets (sigma=+1)
    of occupied mode indices in ascending mode order, so the N=1 sector
    ordering coincides with the mode ordering.
    """

    space: ModeSpace
    sigma: int
    n_particles: int
    occupations: np.ndarray  # (dim, n_modes) small ints

    @property
    def dim(self) -> int:
        return self.occupations.shape[0]

    def occ_tuple(self, i: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.occupations[i])

    @property
    def _lookup(self) -> dict[tuple[int, ...], int]:
        cached = self.__dict__.get("_lookup_cache")
        if cached is None:
            cached = {self.occ_tuple(i): i for i in range(self.dim)}
            self.__dict__["_lookup_cache"] = cached
        return cached

    def index_of(self, occ: tuple[int, ...]) -> int | None:
        return self._lookup.get(occ)


@lru_cache(maxsize=None)
def _build_basis_cached(space: ModeSpace, n_particles: int, sigma: int) -> FockBasis:
    m = space.n_modes
    dim = sector_dimension(m, n_particles, sigma)
    occs = np.zeros((dim, m), dtype=np.int64)
    chooser = combinations if sigma == -1 else combinations_with_replacement
    for row, picked in enumerate(chooser(range(m), n_particles)):
        for idx in picked:
            occs[row, idx] += 1
    occs.setflags(write=False)
    return FockBasis(space, sigma, n_particles, occs)


def build_basis(
    space: ModeSpace, n_particles: int, sigma: int, cap: int = DEFAULT_DIMENSION_CAP
) -> FockBasis:
    """Enumerate the (N, sigma) sector; refuses to build past ``cap`` states."""
    dim = sector_dimension(space.n_modes, n_particles, check_sigma(sigma))
    if dim > cap:
        raise DimensionCapError(
            f"sector N={n_particles}, sigma={sigma:+d} has {dim} states, over the cap {cap}"
        )
    return _build_basis_cached(space, n_particles, sigma)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitudes over one FockBasis."""

    basis: FockBasis
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.basis.dim,):
            raise ValueError(f"amplitude shape {amps.shape} != basis dim {self.basis.dim}")
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def dot(self, other: "StateVector") -> complex:
        """<self|other>, conjugating self."""
        if other.basis is not self.basis and (
            other.basis.space != self.basis.space
            or other.basis.sigma != self.basis.sigma
            or other.basis.n_particles != self.basis.n_particles
        ):
            raise ValueError("states live in different sectors")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def scaled(self, c: complex) -> "StateVector":
        return StateVector(self.basis, self.amplitudes * c)


def zero_state(basis: FockBasis) -> StateVector:
    return StateVector(basis, np.zeros(basis.dim, dtype=np.complex128))


def occ_apply(
    occ: tuple[int, ...], idx: int, dagger: bool, sigma: int
) -> tuple[tuple[int, ...], float] | None:
    """Apply one ladder operator to an occupation tuple.

    Returns (new occupation, numeric factor) or None when the result
    vanishes.  sigma=+1: sqrt(n+1) / sqrt(n) factors; sigma=-1: occupancy
    0/1 with the parity sign over occupied modes before ``idx`` in the
    global mode order.
    """
    n = occ[idx]
    if sigma == -1:
        sign = -1.0 if sum(occ[:idx]) % 2 else 1.0
        if dagger:
            if n:
                return None
            return occ[:idx] + (1,) + occ[idx + 1:], sign
        if not n:
            return None
        return occ[:idx] + (0,) + occ[idx + 1:], sign
    if dagger:
        return occ[:idx] + (n + 1,) + occ[idx + 1:], math.sqrt(n + 1)
    if not n:
        return None
    return occ[:idx] + (n - 1,) + occ[idx + 1:], math.sqrt(n)


def apply_ladder(state: StateVector, op: LadderOp) -> StateVector:
    """Exact ladder action, landing in the N+1 or N-1 sector."""
    basis = state.basis
    n = basis.n_particles
    if not op.dagger and n == 0:
        raise ValueError("cannot annihilate on the vacuum sector")
    target = build_basis(basis.space, n + (1 if op.dagger else -1), basis.sigma)
    idx = basis.space.index(op.mode)
    out = np.zeros(target.dim, dtype=np.complex128)
    for i in np.nonzero(state.amplitudes)[0]:
        res = occ_apply(basis.occ_tuple(int(i)), idx, op.dagger, basis.sigma)
        if res is None:
            continue
        occ, factor = res
        j = target.index_of(occ)
        out[j] += state.amplitudes[i] * factor
    return StateVector(target, out)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Sparse matrix of an operator expression between two sectors."""

    domain: FockBasis
    codomain: FockBasis
    matrix: sp.csr_matrix

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix(self.codomain, self.domain, self.matrix.conj().T.tocsr())


def max_abs(matrix: sp.spmatrix | np.ndarray) -> float:
    """Largest absolute entry; 0.0 for an empty matrix."""
    if sp.issparse(matrix):
        data = matrix.tocoo().data
        return float(np.abs(data).max()) if data.size else 0.0
    arr = np.asarray(matrix)
    return float(np.abs(arr).max()) if arr.size else 0.0


def identity_matrix(basis: FockBasis) -> OperatorMatrix:
    return OperatorMatrix(basis, basis, sp.identity(basis.dim, dtype=np.complex128, format="csr"))


def matrix_of(expr: OperatorExpr, domain: FockBasis, codomain: FockBasis) -> OperatorMatrix:
    """Column j = expr applied to basis state j of the domain sector.

    The expression must change particle number uniformly across terms by
    exactly codomain.N - domain.N.
    """
    if domain.space != codomain.space:
        raise ValueError("domain and codomain live on different mode spaces")
    if expr.sigma != domain.sigma or domain.sigma != codomain.sigma:
        raise ValueError("statistics grade mismatch between expression and bases")
    shape = (codomain.dim, domain.dim)
    if not expr.terms:
        return OperatorMatrix(domain, codomain, sp.csr_matrix(shape, dtype=np.complex128))
    required = codomain.n_particles - domain.n_particles
    shift = expr.particle_shift()
    if shift is None:
        raise ValueError("expression changes particle number non-uniformly")
    if shift != required:
        raise ValueError(
            f"expression shifts particle number by {shift}, sectors differ by {required}"
        )
    space = domain.space
    sigma = domain.sigma
    # (mode index, dagger) per factor, rightmost factor acts first
    compiled = [
        (t.coeff, [(space.index(f.mode), f.dagger) for f in reversed(t.factors)])
        for t in expr.terms
    ]
    rows, cols, vals = [], [], []
    for j in range(domain.dim):
        occ0 = domain.occ_tuple(j)
        for coeff, ops in compiled:
            occ, amp = occ0, coeff
            alive = True
            for idx, dagger in ops:
                res = occ_apply(occ, idx, dagger, sigma)
                if res is None:
                    alive = False
                    break
                occ, factor = res
                amp *= factor
            if not alive:
                continue
            i = codomain.index_of(occ)
            if i is None:
                raise ValueError("operator result left the codomain sector")
            rows.append(i)
            cols.append(j)
            vals.append(amp)
    coo = sp.coo_matrix((vals, (rows, cols)), shape=shape, dtype=np.complex128)
    return OperatorMatrix(domain, codomain, coo.tocsr())


# -- bracket states and overlaps --------------------------------------------


def bracket_state(space: ModeSpace, coords, sigma: int) -> StateVector:
    """(1/sqrt(N!)) a+(xi_1) ... a+(xi_N) |0>, evaluated exactly.

    Duplicate coordinates are allowed; for sigma=-1 they produce the zero
    vector (exclusion).  Swapping two coordinates multiplies the state by
    sigma.
    """
    coords = tuple(coords)
    check_sigma(sigma)
    n = len(coords)
    target = build_basis(space, n, sigma)
    occ: tuple[int, ...] = (0,) * space.n_modes
    amp: complex = 1.0 / math.sqrt(math.factorial(n))
    for mode in reversed(coords):  # rightmost creation acts first
        res = occ_apply(occ, space.index(mode), True, sigma)
        if res is None:
            return zero_state(target)
        occ, factor = res
        amp *= factor
    out = np.zeros(target.dim, dtype=np.complex128)
    out[target.index_of(occ)] = amp
    return StateVector(target, out)


def overlap(space: ModeSpace, bra_coords, ket_coords, sigma: int) -> complex:
    """Inner product of two bracket states; 0 when particle numbers differ."""
    bra_coords, ket_coords = tuple(bra_coords), tuple(ket_coords)
    if len(bra_coords) != len(ket_coords):
        return 0j
    return bracket_state(space, bra_coords, sigma).dot(
        bracket_state(space, ket_coords, sigma)
    )


def perm_parity(perm) -> int:
    """+1 for an even permutation of 0..n-1, -1 for an odd one."""
    perm = tuple(perm)
    seen = [False] * len(perm)
    parity = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            parity = -parity
    return parity


def permanent(mat: np.ndarray) -> complex:
    """Permanent by direct permutation sum (deliberately brute force)."""
    n = mat.shape[0]
    if mat.shape != (n, n):
        raise ValueError("permanent needs a square matrix")
    total = 0j
    for perm in permutations(range(n)):
        prod = 1.0 + 0j
        for row, col in enumerate(perm):
            prod *= mat[row, col]
        total += prod
    return total


def determinant(mat: np.ndarray) -> complex:
    """Determinant by direct permutation expansion (deliberately brute force)."""
    n = mat.shape[0]
    if mat.shape != (n, n):
        raise ValueError("determinant needs a square matrix")
    total = 0j
    for perm in permutations(range(n)):
        prod = complex(perm_parity(perm))
        for row, col in enumerate(perm):
            prod *= mat[row, col]
        total += prod
    return total


def overlap_oracle(bra_coords, ket_coords, sigma: int) -> complex:
    """First-quantized overlap: delta_{N'N}/N! times the sigma-weighted
    permutation sum, i.e. a permanent (sigma=+1) or determinant (sigma=-1)
    of the coordinate delta matrix."""
    check_sigma(sigma)
    bra_coords, ket_coords = tuple(bra_coords), tuple(ket_coords)
    if len(bra_coords) != len(ket_coords):
        return 0j
    n = len(bra_coords)
    if n == 0:
        return 1.0 + 0j
    deltas = np.array(
        [[kron_delta(b, k) for k in ket_coords] for b in bra_coords],
        dtype=np.complex128,
    )
    summed = permanent(deltas) if sigma == 1 else determinant(deltas)
    return summed / math.factorial(n)


# -- first-quantized symmetrizer and completeness ----------------------------


def symmetrizer_oracle(tensor: np.ndarray, sigma: int) -> np.ndarray:
    """(1/N!) sum over permutations of sigma^P times the permuted tensor.

    This is the projector onto the sigma-symmetric subspace, used as the
    independent oracle for the bracket-state completeness relation.
    """
    check_sigma(sigma)
    tensor = np.asarray(tensor)
    n = tensor.ndim
    out = np.zeros_like(tensor, dtype=np.complex128)
    for perm in permutations(range(n)):
        sign = 1.0 if sigma == 1 or perm_parity(perm) == 1 else -1.0
        out += sign * np.transpose(tensor, axes=perm)
    return out / math.factorial(n)


@lru_cache(maxsize=None)
def bracket_matrix(space: ModeSpace, n_particles: int, sigma: int) -> np.ndarray:
    """Dense (sector dim) x (n_modes**N) matrix whose columns are the bracket
    states for every coordinate tuple, in row-major tuple order."""
    m = space.n_modes
    n_tuples = m**n_particles
    if n_tuples > 500_000:
        raise DimensionCapError(f"{n_tuples} coordinate tuples is past desk scale")
    basis = build_basis(space, n_particles, sigma)
    out = np.zeros((basis.dim, n_tuples), dtype=np.complex128)
    for col, idxs in enumerate(np.ndindex(*([m] * n_particles))):
        coords = tuple(space.mode_at(i) for i in idxs)
        out[:, col] = bracket_state(space, coords, sigma).amplitudes
    return out


def project_onto_symmetric(
    space: ModeSpace, n_particles: int, sigma: int, tensor: np.ndarray
) -> np.ndarray:
    """Apply the resolution sum |xi_1..xi_N><xi_1..xi_N| (one measure-weighted
    coordinate sum per slot) to a first-quantized probe tensor."""
    tensor = np.asarray(tensor, dtype=np.complex128)
    m = space.n_modes
    if tensor.shape != (m,) * n_particles:
        raise ValueError(f"probe must have shape {(m,) * n_particles}")
    b = bracket_matrix(space, n_particles, sigma)
    weight = space.lattice.cell_volume**n_particles
    projected = b.conj().T @ (b @ (tensor.reshape(-1) * weight))
    return projected.reshape(tensor.shape)


def completeness_check(
    space: ModeSpace, n_particles: int, sigma: int, probe: np.ndarray
) -> float:
    """Max-norm residual between the bracket-state projector and the
    first-quantized symmetrizer applied to the same probe."""
    projected = project_onto_symmetric(space, n_particles, sigma, probe)
    oracle = symmetrizer_oracle(np.asarray(probe, dtype=np.complex128), sigma)
    return max_abs(projected - oracle)
