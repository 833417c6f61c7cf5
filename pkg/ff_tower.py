"""
Finite Field Tower

Exact arithmetic in the tower F_p ⊂ F_q ⊂ F_{q^n} ⊂ F_{q^{nr}}.

All three fields are built over the prime field with the lexicographically
smallest primitive modulus, and the relative structure over F_q comes from
explicit embedding tables rather than relative extensions. Element arithmetic
is the arithmetic of galois FieldArray scalars; add, sub, mul, inv and
elem_pow wrap it with a same-field check so that mixing contexts raises
ParameterError. This module adds the representation choices (modulus,
primitive element, discrete-log tables), the embeddings, Frobenius maps,
degrees over F_{q^n} and minimal polynomials.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Type, Union

import galois
import numpy as np

logger = logging.getLogger(__name__)

# dlog of the zero element (the column slot epsilon^{-inf} = 0)
MINUS_INFINITY = float('-inf')

CONTEXT_NAMES = ('q', 'qn', 'qnr')


class GoppaError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(GoppaError, ValueError):
    """Invalid parameters, mismatched contexts or a violated precondition."""


class SizeGuardError(GoppaError):
    """A desk-scale size guard refused the request."""


class IncompatibleQuadrupleError(GoppaError, ValueError):
    """(zeta, j, alpha, beta) does not link alpha and beta through F_{q^n}."""


class InternalError(GoppaError, RuntimeError):
    """An invariant that cannot fail for a correct implementation failed."""


@dataclass(frozen=True)
class Params:
    """Parameter triple (q, n, r) with q = p^m."""

    p: int
    m: int
    n: int
    r: int

    @property
    def q(self) -> int:
        return self.p ** self.m

    @property
    def N(self) -> int:
        return self.q ** self.n

    def validate(self) -> 'Params':
        """Check the standing assumptions; returns self for chaining."""
        for name in ('p', 'm', 'n', 'r'):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
                raise ParameterError(f"{name} must be an integer, got {value!r}")
        if self.p < 2 or not galois.is_prime(int(self.p)):
            raise ParameterError(f"p = {self.p} is not prime")
        if self.m < 1 or self.n < 1:
            raise ParameterError(f"m and n must be >= 1, got m={self.m}, n={self.n}")
        if self.r < 2:
            raise ParameterError(f"r must be >= 2 for maximal Goppa codes, got r={self.r}")
        return self

    def as_dict(self) -> Dict[str, int]:
        return {'p': self.p, 'm': self.m, 'n': self.n, 'r': self.r,
                'q': self.q, 'N': self.N}


@dataclass(frozen=True, eq=False)
class FieldCtx:
    """One field of the tower: GF(p^degree) with a fixed primitive modulus.

    Elements are galois FieldArray scalars whose integer value is the
    base-p number formed by their power-basis coordinates, so the
    coordinates (constant term first) are the little-endian base-p digits.
    """

    name: str
    characteristic: int
    degree: int
    modulus: Tuple[int, ...]
    GF: Type[galois.FieldArray] = field(repr=False)
    exp_table: np.ndarray = field(repr=False)
    log_table: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.characteristic ** self.degree

    @property
    def order(self) -> int:
        """Order of the multiplicative group."""
        return self.size - 1

    @property
    def primitive_elem(self) -> galois.FieldArray:
        return self.GF(int(self.exp_table[1 % self.order]))

    @property
    def zero(self) -> galois.FieldArray:
        return self.GF(0)

    @property
    def one(self) -> galois.FieldArray:
        return self.GF(1)

    def elements(self) -> galois.FieldArray:
        """All field elements in integer order."""
        return self.GF(np.arange(self.size, dtype=np.int64))

    def owns(self, x) -> bool:
        return isinstance(x, self.GF)

    def coeffs(self, x) -> Tuple[int, ...]:
        """Power-basis coordinates of x, constant term first."""
        value = int(x)
        digits = []
        for _ in range(self.degree):
            value, digit = divmod(value, self.characteristic)
            digits.append(digit)
        return tuple(digits)

    def coeff_matrix(self, values) -> np.ndarray:
        """Vectorized coordinates: shape (len(values), degree)."""
        ints = as_ints(values).reshape(-1)
        powers = self.characteristic ** np.arange(self.degree, dtype=np.int64)
        return (ints[:, np.newaxis] // powers[np.newaxis, :]) % self.characteristic

    def from_coeffs(self, coeffs: Sequence[int]) -> galois.FieldArray:
        if len(coeffs) != self.degree:
            raise ParameterError(
                f"expected {self.degree} coordinates for GF({self.size}), got {len(coeffs)}")
        value = 0
        for digit in reversed(coeffs):
            if not 0 <= int(digit) < self.characteristic:
                raise ParameterError(f"coordinate {digit} is not a base-{self.characteristic} digit")
            value = value * self.characteristic + int(digit)
        return self.GF(value)

    def power(self, t: Union[int, float]) -> galois.FieldArray:
        """epsilon^t, with epsilon^{-inf} = 0."""
        if t == MINUS_INFINITY:
            return self.zero
        return self.GF(int(self.exp_table[int(t) % self.order]))

    def dlog(self, x) -> Union[int, float]:
        """Discrete log in {1, ..., order}; the element 1 has dlog = order."""
        value = int(x)
        if value == 0:
            return MINUS_INFINITY
        return int(self.log_table[value])

    def dlog_array(self, values) -> np.ndarray:
        """dlog of an array of nonzero elements (0 maps to -1)."""
        return self.log_table[as_ints(values)]

    def describe(self) -> Dict:
        return {
            'name': self.name,
            'characteristic': self.characteristic,
            'degree': self.degree,
            'size': self.size,
            'modulus': list(self.modulus),
            'primitive_elem': list(self.coeffs(self.primitive_elem)),
        }


@dataclass(frozen=True, eq=False)
class TowerEmbedding:
    """Injective ring homomorphism source -> target fixed by one image."""

    source: FieldCtx
    target: FieldCtx
    image: int
    table: np.ndarray = field(repr=False)
    inverse: Dict[int, int] = field(repr=False)

    def __call__(self, x) -> galois.FieldArray:
        if isinstance(x, galois.FieldArray) and not self.source.owns(x):
            raise ParameterError(
                f"context mismatch: expected an element of GF({self.source.size}), got {type(x).__name__}")
        return self.target.GF(self.table[as_ints(x)])

    def contains(self, y) -> bool:
        """True if the target element y lies in the embedded source field."""
        return int(y) in self.inverse

    def pullback(self, y) -> galois.FieldArray:
        """Preimage of a target element that lies in the embedded source."""
        ints = as_ints(y)
        try:
            values = np.vectorize(self.inverse.__getitem__, otypes=[np.int64])(ints)
        except KeyError as e:
            raise ParameterError(
                f"element {e.args[0]} of GF({self.target.size}) is not in the image of "
                f"GF({self.source.size})") from None
        return self.source.GF(values)

    def describe(self) -> Dict:
        return {
            'source': self.source.name,
            'target': self.target.name,
            'image': element_to_json(self.target, self.target.GF(self.image)),
        }


@dataclass(frozen=True, eq=False)
class Tower:
    """GF(q) ⊂ GF(q^n) ⊂ GF(q^{nr}) with consistent embeddings."""

    params: Params
    fq: FieldCtx
    fqn: FieldCtx
    top: FieldCtx
    q_to_qn: TowerEmbedding = field(repr=False)
    qn_to_top: TowerEmbedding = field(repr=False)
    q_to_top: TowerEmbedding = field(repr=False)

    def context(self, name: str) -> FieldCtx:
        contexts = {'q': self.fq, 'qn': self.fqn, 'qnr': self.top}
        if name not in contexts:
            raise ParameterError(f"unknown field context {name!r}; expected one of {CONTEXT_NAMES}")
        return contexts[name]

    def context_of(self, x) -> FieldCtx:
        # Largest field first: when n = 1 GF(q) and GF(q^n) share one class
        for ctx in (self.top, self.fqn, self.fq):
            if ctx.owns(x):
                return ctx
        raise ParameterError(f"element {x!r} does not belong to any field of the tower")

    def frobenius(self, x, e: int = 1) -> galois.FieldArray:
        """x^(q^e), with e reduced modulo the q-order of x's field."""
        ctx = self.context_of(x)
        period = ctx.degree // self.params.m
        return x ** (self.params.q ** (e % period))

    def degree_over(self, alpha) -> int:
        """[F_{q^n}(alpha) : F_{q^n}] for alpha in GF(q^{nr})."""
        alpha = self._top_element(alpha)
        q, n = self.params.q, self.params.n
        for d in range(1, self.params.r + 1):
            if alpha ** (q ** (n * d)) == alpha:
                return d
        raise InternalError(f"element {int(alpha)} has no finite degree over GF(q^n)")

    def conjugates(self, alpha) -> galois.FieldArray:
        """alpha^(q^{n i}) for i = 0, ..., r - 1."""
        alpha = self._top_element(alpha)
        q, n = self.params.q, self.params.n
        return self.top.GF([int(alpha ** (q ** (n * i))) for i in range(self.params.r)])

    def minimal_polynomial(self, alpha, r: Optional[int] = None) -> galois.Poly:
        """g(x) = prod_{i<r} (x - alpha^(q^{n i})) as a monic polynomial over GF(q^n)."""
        r = self.params.r if r is None else r
        if r < 2:
            raise ParameterError(f"Goppa degree r must be >= 2, got r={r}")
        alpha = self._top_element(alpha)
        degree = self.degree_over(alpha)
        if degree != r:
            raise ParameterError(
                f"root {int(alpha)} has degree {degree} over GF(q^n), expected {r}")
        product = galois.Poly.Roots(self.conjugates(alpha))
        try:
            coeffs = self.qn_to_top.pullback(product.coeffs)
        except ParameterError as e:
            raise InternalError(f"minimal polynomial left GF(q^n): {e}") from None
        return galois.Poly(coeffs)

    def dlog(self, x) -> Union[int, float]:
        return self.context_of(x).dlog(x)

    def lift(self, poly: galois.Poly) -> galois.Poly:
        """A polynomial over GF(q^n) viewed over GF(q^{nr})."""
        return galois.Poly(self.qn_to_top(poly.coeffs))

    def describe(self) -> Dict:
        return {
            'params': self.params.as_dict(),
            'fields': {ctx.name: ctx.describe() for ctx in (self.fq, self.fqn, self.top)},
            'embeddings': [emb.describe() for emb in (self.q_to_qn, self.qn_to_top, self.q_to_top)],
        }

    def _top_element(self, alpha) -> galois.FieldArray:
        if isinstance(alpha, (int, np.integer)):
            return self.top.GF(int(alpha))
        if not self.top.owns(alpha):
            raise ParameterError(f"expected an element of GF({self.top.size})")
        return alpha


def as_ints(values) -> np.ndarray:
    """Integer representation of field elements (or pass-through ints)."""
    if isinstance(values, galois.FieldArray):
        return values.view(np.ndarray).astype(np.int64)
    return np.asarray(values, dtype=np.int64)


def _same_context(*operands) -> None:
    kinds = {type(x) for x in operands}
    if len(kinds) != 1 or not issubclass(kinds.pop(), galois.FieldArray):
        names = ', '.join(type(x).__name__ for x in operands)
        raise ParameterError(f"context mismatch: operands belong to {names}")


def add(x, y) -> galois.FieldArray:
    _same_context(x, y)
    return x + y


def sub(x, y) -> galois.FieldArray:
    _same_context(x, y)
    return x - y


def mul(x, y) -> galois.FieldArray:
    _same_context(x, y)
    return x * y


def inv(x) -> galois.FieldArray:
    """Multiplicative inverse; zero raises ZeroDivisionError."""
    _same_context(x)
    if np.any(as_ints(x) == 0):
        raise ZeroDivisionError(f"0 has no inverse in {type(x).__name__}")
    return x ** -1


def elem_pow(x, e: int) -> galois.FieldArray:
    _same_context(x)
    if int(e) < 0:
        return inv(x) ** -int(e)
    return x ** int(e)


def primitive_modulus(p: int, d: int) -> Tuple[int, ...]:
    """Lexicographically smallest primitive monic polynomial of degree d over F_p.

    Coefficients are returned constant term first. Comparison runs from the
    highest non-leading coefficient down, which is the integer order galois
    uses for method="min".
    """
    if d == 1:
        # x + c is primitive iff -c is a primitive root; smallest c <-> largest root
        root = 1 if p == 2 else int(galois.primitive_root(p, method='max'))
        return ((-root) % p, 1)
    poly = galois.primitive_poly(p, d, method='min')
    return tuple(int(c) for c in poly.coeffs[::-1])


def build_field(p: int, d: int, name: str) -> FieldCtx:
    """GF(p^d) with the canonical primitive modulus and its log tables."""
    modulus = primitive_modulus(p, d)
    if d == 1:
        GF = galois.GF(p)
        eps = GF((-modulus[0]) % p)
    else:
        prime_field = galois.GF(p)
        irreducible = galois.Poly(list(reversed(modulus)), field=prime_field)
        GF = galois.GF(p ** d, irreducible_poly=irreducible)
        # residue class of the indeterminate
        eps = GF(p)

    size = p ** d
    order = size - 1
    exp_table = np.zeros(order, dtype=np.int64)
    log_table = np.full(size, -1, dtype=np.int64)
    current = GF(1)
    for t in range(order):
        exp_table[t] = int(current)
        log_table[int(current)] = t if t else order
        current = current * eps

    if len(set(exp_table.tolist())) != order:
        raise InternalError(f"modulus {modulus} of GF({size}) is not primitive")

    logger.debug("Built GF(%d) '%s' with modulus %s", size, name, modulus)
    return FieldCtx(name=name, characteristic=p, degree=d, modulus=modulus,
                    GF=GF, exp_table=exp_table, log_table=log_table)


def embed(source: FieldCtx, target: FieldCtx) -> TowerEmbedding:
    """Embedding sending the source primitive element to the dlog-minimal root
    of the source modulus in the target."""
    if source.characteristic != target.characteristic or target.degree % source.degree:
        raise ParameterError(
            f"GF({source.size}) does not embed in GF({target.size})")

    modulus = galois.Poly(list(reversed(source.modulus)), field=target.GF)
    everything = target.elements()
    values = as_ints(modulus(everything))
    roots = np.flatnonzero(values == 0)
    roots = roots[roots != 0]
    if roots.size == 0:
        raise InternalError(
            f"modulus of GF({source.size}) has no root in GF({target.size})")
    image = int(min(roots, key=lambda y: target.log_table[y]))

    theta = target.GF(image)
    theta_powers = [theta ** i for i in range(source.degree)]
    table = np.zeros(source.size, dtype=np.int64)
    for value in range(source.size):
        acc = target.zero
        for digit, power in zip(source.coeffs(value), theta_powers):
            if digit:
                acc = acc + target.GF(digit) * power
        table[value] = int(acc)

    inverse = {int(y): x for x, y in enumerate(table)}
    if len(inverse) != source.size:
        raise InternalError(f"embedding GF({source.size}) -> GF({target.size}) is not injective")
    return TowerEmbedding(source=source, target=target, image=image, table=table, inverse=inverse)


def compose_embeddings(inner: TowerEmbedding, outer: TowerEmbedding) -> TowerEmbedding:
    """outer ∘ inner."""
    if inner.target is not outer.source:
        raise ParameterError("embeddings do not compose")
    table = outer.table[inner.table]
    inverse = {int(y): x for x, y in enumerate(table)}
    return TowerEmbedding(source=inner.source, target=outer.target,
                          image=int(outer.table[inner.image]), table=table, inverse=inverse)


def build_tower(params: Params) -> Tower:
    """Contexts for GF(q), GF(q^n), GF(q^{nr}) and the embeddings between them."""
    params.validate()
    p, m, n, r = params.p, params.m, params.n, params.r
    fq = build_field(p, m, 'q')
    fqn = build_field(p, m * n, 'qn')
    top = build_field(p, m * n * r, 'qnr')
    q_to_qn = embed(fq, fqn)
    qn_to_top = embed(fqn, top)
    q_to_top = compose_embeddings(q_to_qn, qn_to_top)
    logger.info("Tower GF(%d) ⊂ GF(%d) ⊂ GF(%d) ready", fq.size, fqn.size, top.size)
    return Tower(params=params, fq=fq, fqn=fqn, top=top,
                 q_to_qn=q_to_qn, qn_to_top=qn_to_top, q_to_top=q_to_top)


def element_to_json(ctx: FieldCtx, x) -> Dict:
    return {'ctx': ctx.name, 'coeffs': list(ctx.coeffs(x))}


def element_from_json(tower: Tower, doc: Dict) -> galois.FieldArray:
    ctx = tower.context(doc['ctx'])
    return ctx.from_coeffs(doc['coeffs'])


def poly_to_json(ctx: FieldCtx, poly: galois.Poly) -> List[List[int]]:
    """Coefficient coordinates, constant term first."""
    coeffs = poly.coeffs[::-1]
    return [list(ctx.coeffs(c)) for c in coeffs]


def poly_key(poly: galois.Poly) -> Tuple[int, ...]:
    """Hashable key for a polynomial: integer coefficients, highest degree first."""
    return tuple(int(c) for c in poly.coeffs)
