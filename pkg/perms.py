"""
Column Permutations

AΓL(1,q^n) permutes the columns of H_alpha through the evaluation order:
the map psi sends column c to the position of psi(eps_c). Permutations act
on vectors by gathering, (v . pi)[c] = v[pi(c)], so that

    C(beta) = C(alpha) . rho    whenever    H_alpha . rho = zeta * H_beta^(q^j)

with rho induced by x -> zeta^{-1} x^(q^j) + delta. This module builds those
permutations, decodes arbitrary permutations back into AΓL(1,q^n), computes
parities and cycle types, and embeds the group into AGL(nm, p).
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import galois
import numpy as np
import pandas as pd
from tqdm import tqdm

from actions import SemiaffineMap, act_on_poly, root_of
from ff_tower import (
    IncompatibleQuadrupleError, InternalError, ParameterError,
    SizeGuardError, Tower, add, as_ints, build_field, elem_pow, inv, mul, sub,
)
from goppa import EvaluationOrder, build_parity_row, cached_code, evaluation_order

logger = logging.getLogger(__name__)

# Longest row scanned over all N! permutations
MAX_SCAN_LENGTH = 8

SCAN_CHUNK = 8192


@dataclass(frozen=True)
class ColumnPerm:
    """Permutation of the N column positions; column c goes to image[c] (0-based)."""

    image: Tuple[int, ...]

    @classmethod
    def identity(cls, N: int) -> 'ColumnPerm':
        return cls(tuple(range(N)))

    @classmethod
    def from_array(cls, image: Iterable[int]) -> 'ColumnPerm':
        image = tuple(int(i) for i in image)
        if sorted(image) != list(range(len(image))):
            raise ParameterError(f"{list(image)} is not a permutation")
        return cls(image)

    @property
    def N(self) -> int:
        return len(self.image)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.image, dtype=np.int64)

    def __call__(self, c: int) -> int:
        return self.image[c]

    def compose(self, other: 'ColumnPerm') -> 'ColumnPerm':
        """self ∘ other: c -> self(other(c))."""
        return ColumnPerm(tuple(self.image[i] for i in other.image))

    def inverse(self) -> 'ColumnPerm':
        inverse = [0] * self.N
        for c, i in enumerate(self.image):
            inverse[i] = c
        return ColumnPerm(tuple(inverse))

    def apply(self, vector):
        """Gather: result[c] = vector[image[c]] (works on the last axis)."""
        return np.asarray(vector)[..., self.array]

    def is_identity(self) -> bool:
        return all(c == i for c, i in enumerate(self.image))

    def fixed_points(self) -> List[int]:
        return [c for c, i in enumerate(self.image) if c == i]

    def cycles(self) -> List[Tuple[int, ...]]:
        seen = [False] * self.N
        cycles = []
        for start in range(self.N):
            if seen[start]:
                continue
            cycle = []
            c = start
            while not seen[c]:
                seen[c] = True
                cycle.append(c)
                c = self.image[c]
            cycles.append(tuple(cycle))
        return cycles

    def cycle_type(self) -> Tuple[int, ...]:
        """Cycle lengths (fixed points included), longest first."""
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    def sign(self) -> int:
        return -1 if (self.N - len(self.cycles())) % 2 else 1

    def to_json(self) -> List[int]:
        return [i + 1 for i in self.image]


def sign(pi: ColumnPerm) -> int:
    return pi.sign()


def cycle_type_str(cycle_type: Sequence[int]) -> str:
    """(3, 3, 1, 1) -> '3^2 1^2'."""
    parts = []
    for length, group in itertools.groupby(cycle_type):
        parts.append(f"{length}^{len(list(group))}")
    return ' '.join(parts)


@dataclass(frozen=True, eq=False)
class FieldGroup:
    """AΓL(1,q^n) = {x -> a x^(q^t) + b} acting on evaluation-order positions."""

    order: EvaluationOrder
    p: int
    m: int

    @classmethod
    def of_tower(cls, tower: Tower) -> 'FieldGroup':
        return _group_of_tower(tower)

    @classmethod
    def of_field(cls, q: int, n: int) -> 'FieldGroup':
        return _group_of_field(q, n)

    @property
    def ctx(self):
        return self.order.ctx

    @property
    def q(self) -> int:
        return self.order.q

    @property
    def n(self) -> int:
        return self.order.n

    @property
    def N(self) -> int:
        return self.order.N

    @property
    def size(self) -> int:
        return self.N * (self.N - 1) * self.n

    def map(self, scale: int, shift: int = 0, frob_exp: int = 0) -> SemiaffineMap:
        if not 0 < int(scale) < self.N or not 0 <= int(shift) < self.N:
            raise ParameterError(f"invalid semiaffine map ({scale}, {shift}, {frob_exp}) on GF({self.N})")
        return SemiaffineMap(scale=int(scale), shift=int(shift),
                             frob_exp=int(frob_exp) % self.n, period=self.n)

    def elements(self) -> Iterable[SemiaffineMap]:
        for t in range(self.n):
            for a in range(1, self.N):
                for b in range(self.N):
                    yield SemiaffineMap(scale=a, shift=b, frob_exp=t, period=self.n)

    def evaluate(self, psi: SemiaffineMap, x) -> galois.FieldArray:
        F = self.ctx.GF
        x = x if isinstance(x, F) else F(as_ints(x))
        return add(mul(F(psi.scale), elem_pow(x, self.q ** (psi.frob_exp % self.n))), F(psi.shift))

    def compose(self, outer: SemiaffineMap, inner: SemiaffineMap) -> SemiaffineMap:
        """outer ∘ inner on GF(q^n)."""
        F = self.ctx.GF
        frob = self.q ** (outer.frob_exp % self.n)
        a1, b1 = F(outer.scale), F(outer.shift)
        scale = mul(a1, elem_pow(F(inner.scale), frob))
        shift = add(mul(a1, elem_pow(F(inner.shift), frob)), b1)
        return self.map(int(scale), int(shift), outer.frob_exp + inner.frob_exp)

    def generators(self) -> Dict[str, SemiaffineMap]:
        """tau_eps, mu_eps and sigma."""
        eps = int(self.ctx.primitive_elem)
        return {
            'tau': self.map(1, eps, 0),
            'mu': self.map(eps, 0, 0),
            'sigma': self.map(1, 0, 1),
        }


@lru_cache(maxsize=16)
def _group_of_tower(tower: Tower) -> FieldGroup:
    return FieldGroup(order=evaluation_order(tower), p=tower.params.p, m=tower.params.m)


@lru_cache(maxsize=32)
def _group_of_field(q: int, n: int) -> FieldGroup:
    primes, exponents = galois.factors(q)
    if len(primes) != 1:
        raise ParameterError(f"q = {q} is not a prime power")
    p, m = int(primes[0]), int(exponents[0])
    ctx = build_field(p, m * n, 'qn')
    return FieldGroup(order=EvaluationOrder.build(ctx, m), p=p, m=m)


def perm_of_semiaffine(group: FieldGroup, psi: SemiaffineMap) -> ColumnPerm:
    """Column c -> position of psi(eps_c)."""
    values = group.evaluate(psi, group.order.elements)
    return ColumnPerm(tuple(int(i) for i in group.order.index[as_ints(values)]))


@dataclass(frozen=True)
class FGElement:
    """A permutation decoded as x -> scale * x^(q^frob_exp) + shift."""

    scale: int
    shift: int
    frob_exp: int
    perm: ColumnPerm = field(repr=False)

    @property
    def in_F(self) -> bool:
        """No Frobenius part: the element lies in AGL(1,q^n)."""
        return self.frob_exp == 0

    def as_map(self, group: FieldGroup) -> SemiaffineMap:
        return group.map(self.scale, self.shift, self.frob_exp)

    def to_json(self) -> Dict:
        return {'scale': self.scale, 'shift': self.shift, 'frob_exp': self.frob_exp,
                'perm': self.perm.to_json()}


def membership_in_FG(group: FieldGroup, pi: ColumnPerm) -> Optional[FGElement]:
    """Decode pi as a semiaffine map, or None when it is not one.

    The images of 0 and 1 fix b and a; each exponent t < n is then checked
    on every point.
    """
    if pi.N != group.N:
        return None
    F = group.ctx.GF
    L = group.order.elements
    b = F(int(L[pi.image[group.order.zero_position]]))
    a = F(int(L[pi.image[group.order.one_position]])) - b
    if a == 0:
        return None
    for t in range(group.n):
        psi = group.map(int(a), int(b), t)
        if perm_of_semiaffine(group, psi) == pi:
            return FGElement(scale=int(a), shift=int(b), frob_exp=t, perm=pi)
    return None


def rho_target(tower: Tower, zeta: int, j: int, beta) -> galois.FieldArray:
    """zeta * H_beta^(q^j) over GF(q^{nr})."""
    row = build_parity_row(tower, beta)
    return tower.qn_to_top(int(zeta)) * tower.frobenius(row.entries, j)


def rho_map(tower: Tower, zeta: int, j: int, alpha, beta) -> Tuple[SemiaffineMap, Union[int, float]]:
    """tau_v mu_{zeta^{-1}} sigma^j as a map on GF(q^n), with v = dlog(delta).

    delta = alpha - zeta^{-1} beta^(q^j) must lie in GF(q^n); delta = 0 gives
    v = -inf and no translation factor.
    """
    if not 0 < int(zeta) < tower.fqn.size:
        raise ParameterError(f"zeta must be a nonzero element of GF({tower.fqn.size})")
    top = tower.top.GF
    alpha, beta = top(int(alpha)), top(int(beta))
    zeta_top = tower.qn_to_top(int(zeta))
    delta_top = sub(alpha, mul(inv(zeta_top), tower.frobenius(beta, j)))
    if not tower.qn_to_top.contains(delta_top):
        raise IncompatibleQuadrupleError(
            f"delta = alpha - zeta^-1 beta^(q^{j}) is not in GF({tower.fqn.size}) "
            f"for alpha={int(alpha)}, beta={int(beta)}, zeta={int(zeta)}")
    delta = tower.qn_to_top.pullback(delta_top)
    v = tower.fqn.dlog(delta)
    inverse_zeta = inv(tower.fqn.GF(int(zeta)))
    psi = FieldGroup.of_tower(tower).map(int(inverse_zeta), int(delta), j)
    return psi, v


def build_rho(tower: Tower, zeta: int, j: int, alpha, beta) -> ColumnPerm:
    """rho with H_alpha . rho = zeta * H_beta^(q^j), verified entrywise."""
    psi, v = rho_map(tower, zeta, j, alpha, beta)
    rho = perm_of_semiaffine(FieldGroup.of_tower(tower), psi)
    row = build_parity_row(tower, alpha).as_ints()
    target = as_ints(rho_target(tower, zeta, j, beta))
    if not np.array_equal(rho.apply(row), target):
        raise InternalError(f"rho built from v={v} does not carry H_alpha onto the target row")
    return rho


def compatible_quadruples(tower: Tower, alpha, beta) -> List[Tuple[int, int]]:
    """Every (zeta, j), j in 0..nr-1, with alpha - zeta^{-1} beta^(q^j) in GF(q^n)."""
    n, r = tower.params.n, tower.params.r
    top = tower.top.GF
    alpha, beta = top(int(alpha)), top(int(beta))
    zetas = np.arange(1, tower.fqn.size, dtype=np.int64)
    inverse_zetas = tower.qn_to_top(zetas) ** -1
    in_subfield = np.zeros(tower.top.size, dtype=bool)
    in_subfield[tower.qn_to_top.table] = True
    found = []
    for j in range(n * r):
        deltas = alpha - inverse_zetas * tower.frobenius(beta, j)
        hits = in_subfield[as_ints(deltas)]
        found.extend((int(z), j) for z in zetas[hits])
    return found


def fg_in_alternating(q: int, n: int) -> bool:
    """True iff every generator of AΓL(1,q^n) induces an even column permutation."""
    group = FieldGroup.of_field(q, n)
    return all(perm_of_semiaffine(group, g).sign() == 1 for g in group.generators().values())


def parity_table(pairs: Iterable[Tuple[int, int]]) -> pd.DataFrame:
    rows = []
    for q, n in pairs:
        group = FieldGroup.of_field(q, n)
        for name, g in group.generators().items():
            pi = perm_of_semiaffine(group, g)
            rows.append({'q': q, 'n': n, 'generator': name,
                         'cycle_type': cycle_type_str(pi.cycle_type()), 'sign': pi.sign()})
    return pd.DataFrame(rows, columns=['q', 'n', 'generator', 'cycle_type', 'sign'])


@dataclass(frozen=True)
class AffineRep:
    """x -> matrix @ x + vector over F_p, on power-basis coordinates."""

    p: int
    matrix: Tuple[Tuple[int, ...], ...]
    vector: Tuple[int, ...]

    @property
    def M(self) -> np.ndarray:
        return np.array(self.matrix, dtype=np.int64)

    @property
    def v(self) -> np.ndarray:
        return np.array(self.vector, dtype=np.int64)

    def apply(self, coords: np.ndarray) -> np.ndarray:
        """Rows of coords are points."""
        return (np.asarray(coords) @ self.M.T + self.v) % self.p

    def compose(self, other: 'AffineRep') -> 'AffineRep':
        """self ∘ other."""
        M = (self.M @ other.M) % self.p
        v = (self.M @ other.v + self.v) % self.p
        return AffineRep(p=self.p, matrix=tuple(map(tuple, M.tolist())), vector=tuple(v.tolist()))

    def is_translation(self) -> bool:
        return np.array_equal(self.M, np.eye(len(self.vector), dtype=np.int64))

    def is_invertible(self) -> bool:
        if not self.matrix:
            return True
        GF = galois.GF(self.p)
        return np.linalg.matrix_rank(GF(self.M)) == len(self.vector)

    def to_json(self) -> Dict:
        return {'p': self.p, 'matrix': [list(r) for r in self.matrix], 'vector': list(self.vector)}


def affine_embed(group: FieldGroup, psi: SemiaffineMap) -> AffineRep:
    """psi as an element of AGL(nm, p), checked on every point of GF(q^n)."""
    ctx = group.ctx
    d, p = ctx.degree, ctx.characteristic
    basis = ctx.GF(p ** np.arange(d, dtype=np.int64))
    b = ctx.GF(psi.shift)
    columns = ctx.coeff_matrix(group.evaluate(psi, basis) - b)
    rep = AffineRep(p=p, matrix=tuple(map(tuple, columns.T.tolist())),
                    vector=ctx.coeffs(b))

    everything = ctx.elements()
    expected = ctx.coeff_matrix(group.evaluate(psi, everything))
    if not np.array_equal(rep.apply(ctx.coeff_matrix(everything)), expected):
        raise InternalError(f"{psi} is not F_{p}-affine on GF({ctx.size})")
    if not rep.is_invertible():
        raise InternalError(f"linear part of {psi} is singular")
    return rep


def transvection_perm(group: FieldGroup, u: int, functional: Sequence[int]) -> ColumnPerm:
    """x -> x + f(x) u on GF(2^d), f(x) = <functional, coords(x)> mod 2, f(u) = 0."""
    ctx = group.ctx
    if ctx.characteristic != 2:
        raise ParameterError("transvections are built in characteristic 2")
    w = np.asarray(functional, dtype=np.int64) % 2
    if len(w) != ctx.degree or not w.any():
        raise ParameterError(f"functional must be a nonzero vector of length {ctx.degree}")
    if not 0 < int(u) < ctx.size:
        raise ParameterError("u must be a nonzero element")
    if int(ctx.coeff_matrix([int(u)])[0] @ w) % 2:
        raise ParameterError("f(u) must be 0")

    L = ctx.GF(group.order.elements)
    f = (ctx.coeff_matrix(L) @ w) % 2
    values = L + ctx.GF(f) * ctx.GF(int(u))
    return ColumnPerm(tuple(int(i) for i in group.order.index[as_ints(values)]))


def conjugation_check(tower: Tower, psi: SemiaffineMap, g: galois.Poly) -> bool:
    """C(g^psi) = C(g) . perm(psi), comparing RREF generators."""
    psi = psi.on_field(tower) if psi.period != tower.params.n else psi
    f = act_on_poly(tower, psi, g)
    code_g = cached_code(tower, int(root_of(tower, g))).code
    code_f = cached_code(tower, int(root_of(tower, f))).code
    pi = perm_of_semiaffine(FieldGroup.of_tower(tower), psi)
    return code_g.permuted(pi.image) == code_f


@lru_cache(maxsize=4)
def all_permutations(N: int) -> np.ndarray:
    """Every permutation of range(N) as rows, lexicographic order."""
    if N > MAX_SCAN_LENGTH:
        raise SizeGuardError(f"refusing to list {N}! permutations (guard N <= {MAX_SCAN_LENGTH})")
    return np.array(list(itertools.permutations(range(N))), dtype=np.int64).reshape(-1, N)


def exhaustive_row_matches(row: Sequence[int], target: Sequence[int], workers: int = 1,
                           progress: bool = False) -> List[ColumnPerm]:
    """All pi with row . pi == target, by scanning every permutation."""
    row = np.asarray(row, dtype=np.int64)
    target = np.asarray(target, dtype=np.int64)
    everything = all_permutations(len(row))
    chunks = [everything[i:i + SCAN_CHUNK] for i in range(0, len(everything), SCAN_CHUNK)]

    def scan(chunk: np.ndarray) -> np.ndarray:
        return chunk[(row[chunk] == target).all(axis=1)]

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(tqdm(pool.map(scan, chunks), total=len(chunks), desc='permutations',
                            disable=not progress, leave=False))
    matches = sorted(tuple(int(i) for i in perm) for block in results for perm in block)
    return [ColumnPerm(m) for m in matches]
