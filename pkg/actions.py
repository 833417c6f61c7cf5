"""
Semiaffine Actions and Orbits

S is the set of elements of GF(q^{nr}) of degree exactly r over GF(q^n), P
the set of monic irreducible degree-r polynomials over GF(q^n).

T = AGL(1,q^n)<sigma> acts on S by alpha -> zeta * alpha^(q^i) + xi, and
AΓL(1,q^n) acts on P by sending g to the polynomial whose roots are
psi^{-1}(roots of g). Both actions produce the same orbits on the set of
codes, which correspondence_check verifies by enumeration.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import galois
import numpy as np
import pandas as pd

from ff_tower import (
    InternalError, ParameterError, SizeGuardError, Tower,
    as_ints, inv, poly_key, poly_to_json,
)

logger = logging.getLogger(__name__)

# Largest GF(q^{nr}) whose elements are scanned for roots
MAX_ROOTS = 100_000

GROUP_T = 'T'
GROUP_SEMIAFFINE = 'AΓL(1,q^n)'


@dataclass(frozen=True)
class SemiaffineMap:
    """x -> scale * x^(q^frob_exp) + shift with scale, shift in GF(q^n).

    period is n for maps acting on GF(q^n) and nr for elements of T acting
    on roots; frob_exp is stored reduced modulo period.
    """

    scale: int
    shift: int
    frob_exp: int
    period: int

    @classmethod
    def create(cls, tower: Tower, scale: int, shift: int = 0, frob_exp: int = 0,
               on: str = 'roots') -> 'SemiaffineMap':
        if on not in ('roots', 'field'):
            raise ParameterError(f"a semiaffine map acts on 'roots' or 'field', not {on!r}")
        n, r = tower.params.n, tower.params.r
        period = n * r if on == 'roots' else n
        size = tower.fqn.size
        scale, shift = int(scale), int(shift)
        if not 0 <= scale < size or not 0 <= shift < size:
            raise ParameterError(f"scale and shift must be elements of GF({size})")
        if scale == 0:
            raise ParameterError("semiaffine map with zero scale is not invertible")
        return cls(scale=scale, shift=shift, frob_exp=int(frob_exp) % period, period=period)

    @classmethod
    def identity(cls, tower: Tower, on: str = 'roots') -> 'SemiaffineMap':
        return cls.create(tower, 1, 0, 0, on=on)

    def on_field(self, tower: Tower) -> 'SemiaffineMap':
        """The same map with its exponent reduced modulo n."""
        return SemiaffineMap.create(tower, self.scale, self.shift, self.frob_exp, on='field')

    def to_json(self) -> Dict:
        return {'scale': self.scale, 'shift': self.shift,
                'frob_exp': self.frob_exp, 'period': self.period}


def compose_maps(tower: Tower, outer: SemiaffineMap, inner: SemiaffineMap) -> SemiaffineMap:
    """outer ∘ inner."""
    if outer.period != inner.period:
        raise ParameterError("cannot compose maps acting on different sets")
    F = tower.fqn.GF
    a1, b1, t1 = F(outer.scale), F(outer.shift), outer.frob_exp
    a2, b2 = F(inner.scale), F(inner.shift)
    scale = a1 * tower.frobenius(a2, t1)
    shift = a1 * tower.frobenius(b2, t1) + b1
    return SemiaffineMap(scale=int(scale), shift=int(shift),
                         frob_exp=(t1 + inner.frob_exp) % outer.period, period=outer.period)


def inverse_map(tower: Tower, psi: SemiaffineMap) -> SemiaffineMap:
    """psi^{-1}(w) = ((w - b) / a)^(q^{-t})."""
    F = tower.fqn.GF
    a, b, t = F(psi.scale), F(psi.shift), psi.frob_exp
    scale = tower.frobenius(inv(a), -t)
    shift = -tower.frobenius(b / a, -t)
    return SemiaffineMap(scale=int(scale), shift=int(shift),
                         frob_exp=(-t) % psi.period, period=psi.period)


def act_on_root(tower: Tower, tau: SemiaffineMap, alpha) -> galois.FieldArray:
    """beta = zeta * alpha^(q^i) + xi in GF(q^{nr}); alpha may be an array."""
    if tau.scale == 0:
        raise ParameterError("semiaffine map with zero scale is not invertible")
    top = tower.top.GF
    alpha = alpha if isinstance(alpha, top) else top(as_ints(alpha))
    zeta = tower.qn_to_top(tau.scale)
    xi = tower.qn_to_top(tau.shift)
    return zeta * tower.frobenius(alpha, tau.frob_exp) + xi


def degrees_over(tower: Tower) -> np.ndarray:
    """degree_over for every element of GF(q^{nr}), indexed by integer value."""
    q, n, r = tower.params.q, tower.params.n, tower.params.r
    everything = tower.top.elements()
    degrees = np.zeros(tower.top.size, dtype=np.int64)
    for d in range(1, r + 1):
        if r % d:
            continue
        fixed = as_ints(everything ** (q ** (n * d))) == as_ints(everything)
        degrees[fixed & (degrees == 0)] = d
    return degrees


@dataclass(frozen=True, eq=False)
class RootSet:
    """S: every alpha of degree r over GF(q^n), in dlog order."""

    roots: np.ndarray = field(repr=False)
    position: Dict[int, int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.roots)

    def __iter__(self):
        return (int(a) for a in self.roots)

    def __contains__(self, alpha) -> bool:
        return int(alpha) in self.position


def root_set(tower: Tower, force: bool = False) -> RootSet:
    if tower.top.size > MAX_ROOTS and not force:
        raise SizeGuardError(
            f"GF({tower.top.size}) exceeds the root-scan guard of {MAX_ROOTS} elements")
    degrees = degrees_over(tower)
    candidates = np.flatnonzero(degrees == tower.params.r)
    roots = candidates[np.argsort(tower.top.log_table[candidates], kind='stable')]
    if len(roots) % tower.params.r:
        raise InternalError(f"|S| = {len(roots)} is not divisible by r = {tower.params.r}")
    logger.info("|S| = %d roots of degree %d", len(roots), tower.params.r)
    return RootSet(roots=roots, position={int(a): i for i, a in enumerate(roots)})


@dataclass(frozen=True, eq=False)
class PolySet:
    """P, materialized from S; polynomial i has dlog-minimal root reps[i]."""

    polys: Tuple[galois.Poly, ...] = field(repr=False)
    reps: Tuple[int, ...]
    index: Dict[Tuple[int, ...], int] = field(repr=False)
    root_index: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.polys)

    def lookup(self, g: galois.Poly) -> int:
        key = poly_key(g)
        if key not in self.index:
            raise InternalError(f"polynomial {g} is not a member of P")
        return self.index[key]


def poly_set(tower: Tower, roots: RootSet) -> PolySet:
    root_index = np.full(tower.top.size, -1, dtype=np.int64)
    polys, reps, index = [], [], {}
    for alpha in roots:
        if root_index[alpha] >= 0:
            continue
        g = tower.minimal_polynomial(alpha)
        i = len(polys)
        polys.append(g)
        reps.append(alpha)
        index[poly_key(g)] = i
        root_index[as_ints(tower.conjugates(alpha))] = i

    if len(polys) * tower.params.r != len(roots):
        raise InternalError(f"|P| * r = {len(polys) * tower.params.r} but |S| = {len(roots)}")
    logger.info("|P| = %d irreducible polynomials", len(polys))
    return PolySet(polys=tuple(polys), reps=tuple(reps), index=index, root_index=root_index)


def root_of(tower: Tower, g: galois.Poly) -> galois.FieldArray:
    """The dlog-minimal root of g in GF(q^{nr})."""
    roots = tower.lift(g).roots()
    if len(roots) == 0:
        raise ParameterError(f"{g} has no root in GF({tower.top.size})")
    ints = as_ints(roots)
    return tower.top.GF(int(ints[np.argmin(tower.top.log_table[ints])]))


def act_on_poly(tower: Tower, psi: SemiaffineMap, g: galois.Poly,
                method: str = 'roots') -> galois.Poly:
    """g^psi: the monic polynomial whose roots are psi^{-1}(roots of g).

    method='roots' transforms one root and takes its minimal polynomial;
    method='coefficients' uses g(a x^(q^t) + b) = (sum gbar_i (abar x + bbar)^i)^(q^t)
    where gbar_i, abar, bbar are the q^t-th roots of g_i, a, b.
    """
    psi = psi.on_field(tower) if psi.period != tower.params.n else psi
    if method == 'roots':
        alpha = root_of(tower, g)
        beta = act_on_root(tower, inverse_map(tower, psi), alpha)
        return tower.minimal_polynomial(beta)
    if method != 'coefficients':
        raise ParameterError(f"unknown act_on_poly method {method!r}")

    F = tower.fqn.GF
    t = psi.frob_exp
    gbar = tower.frobenius(F(g.coeffs[::-1]), -t)
    abar = tower.frobenius(F(psi.scale), -t)
    bbar = tower.frobenius(F(psi.shift), -t)
    linear = galois.Poly(F([int(abar), int(bbar)]))
    h = galois.Poly.Zero(F)
    power = galois.Poly.One(F)
    for coefficient in gbar:
        h = h + galois.Poly(F([int(coefficient)])) * power
        power = power * linear
    return galois.Poly(h.coeffs / h.coeffs[0])


def group_generators(tower: Tower, on: str = 'roots') -> Dict[str, SemiaffineMap]:
    """mu_eps, tau_eps and sigma; they generate T (on roots) or AΓL(1,q^n)."""
    eps = int(tower.fqn.primitive_elem)
    return {
        'mu': SemiaffineMap.create(tower, eps, 0, 0, on=on),
        'tau': SemiaffineMap.create(tower, 1, eps, 0, on=on),
        'sigma': SemiaffineMap.create(tower, 1, 0, 1, on=on),
    }


def group_order_T(tower: Tower) -> int:
    N, n, r = tower.params.N, tower.params.n, tower.params.r
    return N * (N - 1) * n * r


def group_order_semiaffine(tower: Tower) -> int:
    N, n = tower.params.N, tower.params.n
    return N * (N - 1) * n


@dataclass(frozen=True)
class Orbit:
    rep: int
    members: Tuple[int, ...]
    ground: str
    group: str

    @property
    def size(self) -> int:
        return len(self.members)


def _closure(start_order: Sequence[int], neighbours: List[np.ndarray], ground: str,
             group: str, sort_key) -> List[Orbit]:
    seen = set()
    orbits = []
    for start in start_order:
        if start in seen:
            continue
        seen.add(start)
        queue = deque([start])
        members = [start]
        while queue:
            x = queue.popleft()
            for table in neighbours:
                y = int(table[x])
                if y not in seen:
                    seen.add(y)
                    members.append(y)
                    queue.append(y)
        members.sort(key=sort_key)
        orbits.append(Orbit(rep=members[0], members=tuple(members), ground=ground, group=group))
    return orbits


def orbits_on_S(tower: Tower, roots: Optional[RootSet] = None) -> List[Orbit]:
    """T-orbits on S by breadth-first closure under the three generators."""
    roots = root_set(tower) if roots is None else roots
    everything = tower.top.elements()
    tables = [as_ints(act_on_root(tower, tau, everything))
              for tau in group_generators(tower, on='roots').values()]
    log_table = tower.top.log_table
    orbits = _closure([int(a) for a in roots], tables, 'S', GROUP_T,
                      sort_key=lambda a: log_table[a])
    for orbit in orbits:
        if any(a not in roots for a in orbit.members):
            raise InternalError(f"orbit of {orbit.rep} left S")
    logger.info("%d T-orbits on S", len(orbits))
    return orbits


def orbits_on_P(tower: Tower, polys: Optional[PolySet] = None,
                method: str = 'coefficients') -> List[Orbit]:
    """AΓL(1,q^n)-orbits on P; members are indices into the PolySet."""
    polys = poly_set(tower, root_set(tower)) if polys is None else polys
    neighbours = []
    for psi in group_generators(tower, on='field').values():
        table = np.array([polys.lookup(act_on_poly(tower, psi, g, method=method))
                          for g in polys.polys], dtype=np.int64)
        neighbours.append(table)
    orbits = _closure(list(range(len(polys))), neighbours, 'P', GROUP_SEMIAFFINE,
                      sort_key=lambda i: i)
    logger.info("%d %s-orbits on P", len(orbits), GROUP_SEMIAFFINE)
    return orbits


def orbits_by_full_group(tower: Tower, roots: Optional[RootSet] = None) -> List[Orbit]:
    """T-orbits on S by applying every one of the |T| maps to each root."""
    roots = root_set(tower) if roots is None else roots
    n, r = tower.params.n, tower.params.r
    fqn_ints = np.arange(tower.fqn.size, dtype=np.int64)
    zetas = tower.qn_to_top(fqn_ints[1:])
    xis = tower.qn_to_top(fqn_ints)
    log_table = tower.top.log_table

    seen = set()
    orbits = []
    for alpha in roots:
        if alpha in seen:
            continue
        x = tower.top.GF(alpha)
        frobs = tower.top.GF([int(tower.frobenius(x, i)) for i in range(n * r)])
        images = (zetas[:, np.newaxis, np.newaxis] * frobs[np.newaxis, :, np.newaxis]) \
            + xis[np.newaxis, np.newaxis, :]
        members = sorted({int(v) for v in as_ints(images).ravel()}, key=lambda a: log_table[a])
        seen.update(members)
        orbits.append(Orbit(rep=members[0], members=tuple(members), ground='S', group=GROUP_T))
    return orbits


def orbit_stabilizer_sizes(tower: Tower, orbits: Sequence[Orbit]) -> List[int]:
    """|Stab| = |G| / |orbit| for each orbit; the quotient must be exact."""
    sizes = []
    for orbit in orbits:
        order = group_order_T(tower) if orbit.group == GROUP_T else group_order_semiaffine(tower)
        stabilizer, remainder = divmod(order, orbit.size)
        if remainder:
            raise InternalError(f"orbit of size {orbit.size} does not divide |{orbit.group}| = {order}")
        sizes.append(stabilizer)
    return sizes


def correspondence_check(orbits_S: Sequence[Orbit], orbits_P: Sequence[Orbit],
                         polys: PolySet) -> bool:
    """True iff alpha -> minimal polynomial induces a bijection of orbit sets."""
    by_members = {frozenset(orbit.members): i for i, orbit in enumerate(orbits_P)}
    hit = set()
    for orbit in orbits_S:
        image = frozenset(int(polys.root_index[a]) for a in orbit.members)
        if image not in by_members:
            logger.warning("S-orbit of %d maps onto no single P-orbit", orbit.rep)
            return False
        target = by_members[image]
        if target in hit:
            logger.warning("two S-orbits map onto P-orbit %d", target)
            return False
        hit.add(target)
    if len(hit) != len(orbits_P):
        logger.warning("%d P-orbits are not images of S-orbits", len(orbits_P) - len(hit))
        return False
    return True


def orbit_report(tower: Tower, orbits: Sequence[Orbit], polys: Optional[PolySet] = None) -> Dict:
    """Orbit JSON. S members are exponents t with alpha = eps^t in GF(q^{nr});
    P members are coefficient lists, constant term first."""
    ground = orbits[0].ground if orbits else 'S'
    stabilizers = orbit_stabilizer_sizes(tower, orbits)

    def encode(x: int):
        if ground == 'S':
            return int(tower.top.log_table[x])
        return poly_to_json(tower.fqn, polys.polys[x])

    return {
        'params': tower.params.as_dict(),
        'set': ground,
        'orbit_count': len(orbits),
        'orbits': [
            {'rep': encode(orbit.rep), 'size': orbit.size, 'stabilizer': stabilizer,
             'members': [encode(x) for x in orbit.members]}
            for orbit, stabilizer in zip(orbits, stabilizers)
        ],
    }


def orbit_table(tower: Tower, orbits: Sequence[Orbit]) -> pd.DataFrame:
    rows = []
    for orbit, stabilizer in zip(orbits, orbit_stabilizer_sizes(tower, orbits)):
        rep = int(tower.top.log_table[orbit.rep]) if orbit.ground == 'S' else orbit.rep
        rows.append({'set': orbit.ground, 'group': orbit.group, 'rep': rep,
                     'size': orbit.size, 'stabilizer': stabilizer})
    return pd.DataFrame(rows, columns=['set', 'group', 'rep', 'size', 'stabilizer'])
