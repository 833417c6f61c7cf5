"""
Goppa Code Construction

Builds C(alpha) for a root alpha of degree r over GF(q^n): the parity row
H_alpha over GF(q^{nr}), its F_q subfield subcode in reduced row-echelon
form, and the two membership tests (the congruence modulo g(x) and the r
conjugate equations). Also houses the linear-code plumbing shared by the
equivalence machinery: dual codes, codeword enumeration and weight
enumerators.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple, Type

import galois
import numpy as np

from ff_tower import (
    FieldCtx, InternalError, ParameterError, SizeGuardError, Tower,
    as_ints, element_to_json, poly_to_json,
)

logger = logging.getLogger(__name__)

# Largest dimension whose codewords are enumerated (q^dim vectors)
MAX_ENUM_DIM = 24

# Messages per block when enumerating codewords
ENUM_BLOCK = 1 << 16


@dataclass(frozen=True, eq=False)
class EvaluationOrder:
    """The ordered support L = (eps, eps^2, ..., eps^{q^n - 1}, 0).

    Column positions are 0-based here: position c - 1 holds eps^c and the
    last position N - 1 holds 0. Reports use the 1-based column numbers.
    """

    ctx: FieldCtx
    q: int
    n: int
    elements: np.ndarray = field(repr=False)
    index: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, ctx: FieldCtx, m: int) -> 'EvaluationOrder':
        if ctx.degree % m:
            raise ParameterError(f"GF({ctx.size}) is not an extension of GF({ctx.characteristic}^{m})")
        N = ctx.size
        elements = np.zeros(N, dtype=np.int64)
        for c in range(1, N):
            elements[c - 1] = ctx.exp_table[c % ctx.order]
        elements[N - 1] = 0
        index = np.zeros(N, dtype=np.int64)
        index[elements] = np.arange(N)
        return cls(ctx=ctx, q=ctx.characteristic ** m, n=ctx.degree // m,
                   elements=elements, index=index)

    @property
    def N(self) -> int:
        return len(self.elements)

    @property
    def one_position(self) -> int:
        """Position of the element 1 = eps^{q^n - 1}."""
        return self.N - 2 if self.N > 1 else 0

    @property
    def zero_position(self) -> int:
        return self.N - 1

    def support(self) -> galois.FieldArray:
        return self.ctx.GF(self.elements)


@lru_cache(maxsize=16)
def evaluation_order(tower: Tower) -> EvaluationOrder:
    return EvaluationOrder.build(tower.fqn, tower.params.m)


@dataclass(frozen=True, eq=False)
class ParityRow:
    """H_alpha = (1/(alpha - eps_1), ..., 1/(alpha - eps_N)) over GF(q^{nr})."""

    alpha: int
    entries: galois.FieldArray = field(repr=False)

    def as_ints(self) -> np.ndarray:
        return as_ints(self.entries)


@dataclass(frozen=True)
class LinearCode:
    """F_q-linear code stored as its RREF generator (pivot-leftmost).

    Equality and hashing use (q, length, generator), so two codes are equal
    exactly when they have the same row space.
    """

    q: int
    length: int
    generator: Tuple[Tuple[int, ...], ...]
    pivots: Tuple[int, ...] = field(compare=False)
    gf: Type[galois.FieldArray] = field(compare=False, repr=False)

    @property
    def k(self) -> int:
        return len(self.generator)

    @property
    def matrix(self) -> galois.FieldArray:
        if not self.generator:
            return self.gf.Zeros((0, self.length))
        return self.gf(np.array(self.generator, dtype=np.int64))

    @classmethod
    def from_matrix(cls, gf: Type[galois.FieldArray], matrix, length: Optional[int] = None) -> 'LinearCode':
        """Row space of `matrix` (any spanning set) in canonical RREF."""
        rows = np.asarray(as_ints(matrix), dtype=np.int64)
        if rows.ndim == 1:
            rows = rows.reshape(1, -1) if rows.size else rows.reshape(0, length or 0)
        length = rows.shape[1] if length is None else length
        if rows.shape[0] == 0 or not rows.any():
            return cls(q=gf.order, length=length, generator=(), pivots=(), gf=gf)

        reduced = as_ints(gf(rows).row_reduce())
        generator = []
        pivots = []
        for row in reduced:
            nonzero = np.flatnonzero(row)
            if nonzero.size == 0:
                continue
            pivots.append(int(nonzero[0]))
            generator.append(tuple(int(v) for v in row))
        return cls(q=gf.order, length=length, generator=tuple(generator),
                   pivots=tuple(pivots), gf=gf)

    def permuted(self, image: Sequence[int]) -> 'LinearCode':
        """Code whose codewords are c[image] for c in this code."""
        image = np.asarray(image, dtype=np.int64)
        if not self.generator:
            return self
        return LinearCode.from_matrix(self.gf, np.array(self.generator)[:, image], self.length)

    def is_rref(self) -> bool:
        """Re-reduction is a fixed point."""
        if not self.generator:
            return True
        return LinearCode.from_matrix(self.gf, self.matrix, self.length) == self

    def contains(self, vector: Sequence[int]) -> bool:
        if not self.generator:
            return not any(vector)
        extended = LinearCode.from_matrix(
            self.gf, np.vstack([np.array(self.generator), np.asarray(vector, dtype=np.int64)]),
            self.length)
        return extended.k == self.k

    def to_json(self) -> Dict:
        return {
            'q': self.q,
            'N': self.length,
            'k': self.k,
            'generator': [d for row in self.generator for d in row],
            'pivots': list(self.pivots),
        }


@dataclass(frozen=True, eq=False)
class GoppaCode:
    """C(alpha) together with its Goppa polynomial and parity row."""

    alpha: int
    g: galois.Poly
    row: ParityRow
    code: LinearCode

    def to_json(self, tower: Tower, weight_enumerator_: Optional[Sequence[int]] = None) -> Dict:
        doc = {
            'alpha': element_to_json(tower.top, tower.top.GF(self.alpha)),
            'g': poly_to_json(tower.fqn, self.g),
            'N': self.code.length,
            'k': self.code.k,
            'generator': [d for row in self.code.generator for d in row],
        }
        if weight_enumerator_ is not None:
            doc['weight_enumerator'] = list(weight_enumerator_)
        return doc


def build_parity_row(tower: Tower, alpha, support: Optional[Sequence[int]] = None) -> ParityRow:
    """H_alpha under the fixed evaluation order (or an explicit support order)."""
    alpha = tower.top.GF(int(alpha))
    degree = tower.degree_over(alpha)
    if degree != tower.params.r:
        raise ParameterError(
            f"root {int(alpha)} has degree {degree} over GF(q^n), expected r={tower.params.r}")
    if support is None:
        support = evaluation_order(tower).elements
    support_top = tower.qn_to_top(np.asarray(support, dtype=np.int64))
    entries = (alpha - support_top) ** -1
    return ParityRow(alpha=int(alpha), entries=entries)


def subfield_subcode(tower: Tower, row: ParityRow) -> LinearCode:
    """All c in F_q^N with sum c_i * h_i = 0, as an RREF generator over F_q.

    Each coordinate c_i is written in the F_p-basis 1, theta, ..., theta^{m-1}
    of the embedded GF(q) (theta the image of the GF(q) primitive element),
    which turns the constraint into nmr equations over F_p in Nm unknowns.
    """
    p, m = tower.params.p, tower.params.m
    entries = row.entries
    N = len(entries)

    basis = tower.q_to_top(np.array([p ** j for j in range(m)], dtype=np.int64))
    # column (i, j) holds the F_p-coordinates of theta^j * h_i
    products = entries[:, np.newaxis] * basis[np.newaxis, :]
    system = tower.top.coeff_matrix(products.reshape(-1)).T

    prime_field = galois.GF(p)
    kernel = prime_field(system).null_space()
    kernel = as_ints(kernel).reshape(-1, N * m)
    if kernel.shape[0] == 0 or not kernel.any():
        return LinearCode(q=tower.params.q, length=N, generator=(), pivots=(), gf=tower.fq.GF)

    # F_p-coordinates back to integer representation of GF(q)
    digits = kernel.reshape(-1, N, m)
    weights = p ** np.arange(m, dtype=np.int64)
    vectors = digits @ weights
    code = LinearCode.from_matrix(tower.fq.GF, vectors, N)

    bound = N - tower.params.n * tower.params.r
    if code.k < bound:
        raise InternalError(f"subfield subcode has k={code.k} < N - nr = {bound}")
    return code


def check_goppa_condition(tower: Tower, codeword: Sequence[int], g: galois.Poly,
                          support: Optional[Sequence[int]] = None) -> bool:
    """sum c_i (x - eps_i)^{-1} == 0 mod g(x), inverses by extended Euclid over GF(q^n)."""
    if support is None:
        support = evaluation_order(tower).elements
    F = tower.fqn.GF
    coefficients = tower.q_to_qn.table[np.asarray(codeword, dtype=np.int64)]
    total = galois.Poly.Zero(F)
    for c, point in zip(coefficients, support):
        if not c:
            continue
        linear = galois.Poly.Roots(F([int(point)]))
        d, s, _ = galois.egcd(linear, g)
        if d != galois.Poly.One(F):
            raise ParameterError(f"x - {int(point)} is not invertible modulo g")
        total = total + galois.Poly(F([int(c)])) * s
    return total % g == galois.Poly.Zero(F)


def check_r_equations(tower: Tower, codeword: Sequence[int], alpha,
                      support: Optional[Sequence[int]] = None) -> bool:
    """sum_i c_i / (alpha^(q^{nj}) - eps_i) = 0 for j = 0, ..., r - 1."""
    if support is None:
        support = evaluation_order(tower).elements
    support_top = tower.qn_to_top(np.asarray(support, dtype=np.int64))
    weights = tower.q_to_top(np.asarray(codeword, dtype=np.int64))
    for conjugate in tower.conjugates(alpha):
        total = np.sum(weights * (conjugate - support_top) ** -1)
        if total != 0:
            return False
    return True


def code_of_root(tower: Tower, alpha) -> GoppaCode:
    """C(alpha) with g = minimal polynomial of alpha over GF(q^n)."""
    alpha = tower.top.GF(int(alpha))
    g = tower.minimal_polynomial(alpha)
    row = build_parity_row(tower, alpha)
    code = subfield_subcode(tower, row)
    logger.debug("C(%d): [%d, %d]", int(alpha), code.length, code.k)
    return GoppaCode(alpha=int(alpha), g=g, row=row, code=code)


@lru_cache(maxsize=8192)
def cached_code(tower: Tower, alpha: int) -> GoppaCode:
    return code_of_root(tower, alpha)


def dual_code(code: LinearCode) -> LinearCode:
    """C^perp with the same RREF convention."""
    if code.k == 0:
        return full_space(code.gf, code.length)
    if code.k == code.length:
        return LinearCode(q=code.q, length=code.length, generator=(), pivots=(), gf=code.gf)
    return LinearCode.from_matrix(code.gf, code.matrix.null_space(), code.length)


def codewords(code: LinearCode, force: bool = False) -> np.ndarray:
    """Every codeword as a row of integers; shape (q^k, N)."""
    if code.k > MAX_ENUM_DIM and not force:
        raise SizeGuardError(
            f"refusing to enumerate {code.q}^{code.k} codewords (guard k <= {MAX_ENUM_DIM})")
    if code.k == 0:
        return np.zeros((1, code.length), dtype=np.int64)

    q, k = code.q, code.k
    G = code.matrix
    powers = q ** np.arange(k - 1, -1, -1, dtype=np.int64)
    total = q ** k
    blocks = []
    for start in range(0, total, ENUM_BLOCK):
        idx = np.arange(start, min(total, start + ENUM_BLOCK), dtype=np.int64)
        messages = (idx[:, np.newaxis] // powers[np.newaxis, :]) % q
        blocks.append(as_ints(code.gf(messages) @ G))
    return np.vstack(blocks)


def encode_words(words: np.ndarray, q: int) -> np.ndarray:
    """Each row (or last axis) of base-q digits packed into one integer."""
    length = words.shape[-1]
    if length and q ** length > np.iinfo(np.int64).max:
        raise ParameterError(f"{q}^{length} words do not pack into int64")
    powers = q ** np.arange(length - 1, -1, -1, dtype=np.int64)
    return words @ powers


def macwilliams_transform(dual_enumerator: Sequence[int], length: int, q: int) -> List[int]:
    """Weight enumerator of C from that of C^perp (exact integer arithmetic)."""
    size = sum(int(w) for w in dual_enumerator)
    result = []
    for i in range(length + 1):
        total = 0
        for j, count in enumerate(dual_enumerator):
            if not count:
                continue
            krawtchouk = sum((-1) ** s * (q - 1) ** (i - s) * comb(j, s) * comb(length - j, i - s)
                             for s in range(0, i + 1))
            total += int(count) * krawtchouk
        if total % size:
            raise InternalError("MacWilliams transform produced a non-integer count")
        result.append(total // size)
    return result


def _direct_enumerator(code: LinearCode, force: bool) -> List[int]:
    words = codewords(code, force=force)
    weights = np.count_nonzero(words, axis=1)
    counts = np.bincount(weights, minlength=code.length + 1)
    return [int(c) for c in counts]


def weight_enumerator(code: LinearCode, force: bool = False) -> List[int]:
    """W_i = number of codewords of weight i, for i = 0, ..., N.

    Enumerates whichever of C and C^perp has the smaller dimension; the guard
    applies to that dimension.
    """
    if code.k <= code.length - code.k:
        return _direct_enumerator(code, force)
    dual = dual_code(code)
    return macwilliams_transform(_direct_enumerator(dual, force), code.length, code.q)


def min_distance(code: LinearCode, force: bool = False) -> Optional[int]:
    """Minimum nonzero weight; None for the zero code."""
    enumerator = weight_enumerator(code, force=force)
    for weight, count in enumerate(enumerator):
        if weight and count:
            return weight
    return None


def full_space(gf: Type[galois.FieldArray], length: int) -> LinearCode:
    return LinearCode.from_matrix(gf, gf.Identity(length), length)

