"""
Permutation Equivalence

Decides whether two F_q-linear codes of the same length differ only by a
coordinate permutation, with a verified witness, and classifies the set of
maximal irreducible Goppa codes for given (q, n, r).

Canonical form
--------------
Work on D, the smaller-dimensional of C and its dual (a permutation maps C1
onto C2 iff it maps the duals onto each other). For an ordered information
set B = (b_1, ..., b_k) of D, reordering the columns as

    zero columns, b_1, ..., b_k, remaining columns sorted

gives an RREF whose columns are 0, e_1, ..., e_k followed by the sorted
coordinates of the other columns in the basis B. The canonical form is the
minimum of the sorted remainder over admissible ordered information sets.

Admissible sets come from an individualization-refinement search. Given
the ordered prefix (b_1, ..., b_l), every column gets the label

    sorted multiset of (wt(w), w restricted to the prefix, w_c) over w in D

and b_{l+1} ranges over the independent columns with the smallest label.
Labels only use permutation-invariant data, so equal canonical forms mean
equivalent codes and vice versa. Two leaves with equal remainders give an
automorphism of D; children of a node that an automorphism fixing the
prefix maps onto an explored child are skipped.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import galois
import numpy as np
import pandas as pd

from actions import orbits_on_S, poly_set, root_set
from ff_tower import InternalError, ParameterError, SizeGuardError, Tower
from goppa import (
    LinearCode, cached_code, codewords, dual_code, encode_words, macwilliams_transform,
)
from perms import (
    ColumnPerm, FieldGroup, all_permutations, build_rho, compatible_quadruples, membership_in_FG,
)

logger = logging.getLogger(__name__)

MAX_EQUIV_LENGTH = 64
MAX_EQUIV_DIM = 24
MAX_BRUTE_FORCE_LENGTH = 8
MAX_CLASSIFY_POLYS = 1000

# Leaves of one canonical-form search
MAX_SEARCH_LEAVES = 1_000_000

# Permutations processed per vectorized block in the N! scan
CANDIDATE_BLOCK = 2048


def working_code(code: LinearCode) -> Tuple[LinearCode, bool]:
    """(D, is_dual): the smaller-dimensional of C and C^perp (C on ties)."""
    if code.k <= code.length - code.k:
        return code, False
    return dual_code(code), True


def _guard(code: LinearCode, force: bool) -> None:
    if force:
        return
    if code.length > MAX_EQUIV_LENGTH:
        raise SizeGuardError(f"length {code.length} exceeds the equivalence guard N <= {MAX_EQUIV_LENGTH}")
    if min(code.k, code.length - code.k) > MAX_EQUIV_DIM:
        raise SizeGuardError(f"dimension {code.k} exceeds the equivalence guard k <= {MAX_EQUIV_DIM}")


def column_profiles(words: np.ndarray) -> List[Tuple[int, ...]]:
    """For each column: how many codewords of each weight are nonzero there."""
    N = words.shape[1]
    weights = np.count_nonzero(words, axis=1)
    profiles = []
    for c in range(N):
        counts = np.bincount(weights[words[:, c] != 0], minlength=N + 1)
        profiles.append(tuple(int(x) for x in counts))
    return profiles


@dataclass(frozen=True)
class CodeInvariant:
    """Necessary conditions for permutation equivalence."""

    q: int
    length: int
    k: int
    weight_enumerator: Tuple[int, ...]
    profiles: Tuple[Tuple[int, ...], ...]


def compute_invariant(code: LinearCode, force: bool = False) -> CodeInvariant:
    _guard(code, force)
    small, is_dual = working_code(code)
    words = codewords(small, force=force)
    counts = np.bincount(np.count_nonzero(words, axis=1), minlength=code.length + 1)
    enumerator = [int(c) for c in counts]
    if is_dual:
        enumerator = macwilliams_transform(enumerator, code.length, code.q)
    return CodeInvariant(q=code.q, length=code.length, k=code.k,
                         weight_enumerator=tuple(enumerator),
                         profiles=tuple(sorted(column_profiles(words))))


@dataclass(frozen=True)
class CanonicalForm:
    """Canonical generator of D (columns as coordinate tuples) and the column
    order producing it: canonical column c is original column order[c]."""

    q: int
    length: int
    k: int
    is_dual: bool
    columns: Tuple[Tuple[int, ...], ...]
    order: ColumnPerm = field(compare=False)
    leaves: int = field(default=0, compare=False)

    @property
    def key(self) -> Tuple:
        return (self.q, self.length, self.k, self.is_dual, self.columns)

    def matrix(self) -> np.ndarray:
        if not self.columns or not self.columns[0]:
            return np.zeros((0, self.length), dtype=np.int64)
        return np.array(self.columns, dtype=np.int64).T


def _prefix_pattern(words: np.ndarray, q: int, prefix: Sequence[int]) -> np.ndarray:
    """Restriction of every codeword to the ordered prefix, packed base q."""
    pattern = np.zeros(words.shape[0], dtype=np.int64)
    for b in prefix:
        pattern = pattern * q + words[:, b]
    return pattern


def _orbit_ids(N: int, generators: Sequence[np.ndarray]) -> np.ndarray:
    """Smallest column of each column's orbit under the generated group."""
    ids = np.arange(N, dtype=np.int64)
    changed = bool(generators)
    while changed:
        changed = False
        for g in generators:
            merged = np.minimum(ids, ids[g])
            np.minimum.at(merged, g, ids)
            if not np.array_equal(merged, ids):
                ids, changed = merged, True
    return ids


class _CanonicalSearch:
    """Depth-first search over admissible ordered information sets of D."""

    def __init__(self, words: np.ndarray, q: int, k: int, force: bool):
        self.words = words
        self.q = q
        self.k = k
        self.N = words.shape[1]
        self.force = force
        self.weights = np.count_nonzero(words, axis=1).astype(np.int64)
        self.column_weights = q ** np.arange(k - 1, -1, -1, dtype=np.int64)
        self.reference = np.unique(words, axis=0)
        self.automorphisms: List[np.ndarray] = []
        self.best = None
        self.leaves = 0

    def run(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(basis, keys, coords) of the leaf with the smallest remainder."""
        self._descend([])
        _, basis, keys, coords = self.best
        return basis, keys, coords

    def children(self, prefix: List[int]) -> np.ndarray:
        """Independent extensions of the prefix carrying the smallest label."""
        level = len(prefix)
        free = np.setdiff1d(np.arange(self.N, dtype=np.int64), np.asarray(prefix, dtype=np.int64))
        pattern = _prefix_pattern(self.words, self.q, prefix)
        extended = pattern[:, np.newaxis] * self.q + self.words[:, free]
        distinct = 1 + np.count_nonzero(np.diff(np.sort(extended, axis=0), axis=0), axis=0)
        free = free[distinct == self.q ** (level + 1)]
        if free.size == 0:
            raise InternalError(f"no information set of size {level + 1} in a dimension-{self.k} code")

        head = (self.weights * self.q ** level + pattern) * self.q
        labels = np.sort(head[:, np.newaxis] + self.words[:, free], axis=0).T
        first = np.lexsort(labels.T[::-1])[0]
        return free[(labels == labels[first]).all(axis=1)]

    def order_of(self, basis: np.ndarray, keys: np.ndarray) -> List[int]:
        zeros = [c for c in range(self.N) if keys[c] == 0]
        rest = sorted((c for c in range(self.N) if keys[c] > 0), key=lambda c: (keys[c], c))
        return zeros + [int(b) for b in basis] + rest

    def _descend(self, prefix: List[int]) -> None:
        fixed = np.asarray(prefix, dtype=np.int64)
        explored: List[int] = []
        known, ids = -1, None
        for child in self.children(prefix):
            if known != len(self.automorphisms):
                known = len(self.automorphisms)
                stabilizer = [g for g in self.automorphisms if np.array_equal(g[fixed], fixed)]
                ids = _orbit_ids(self.N, stabilizer)
            if any(ids[child] == ids[c] for c in explored):
                continue
            explored.append(int(child))
            if len(prefix) + 1 == self.k:
                self._leaf(prefix + [int(child)])
            else:
                self._descend(prefix + [int(child)])

    def _leaf(self, basis: List[int]) -> None:
        self.leaves += 1
        if self.leaves > MAX_SEARCH_LEAVES and not self.force:
            raise SizeGuardError(f"canonical form search exceeds {MAX_SEARCH_LEAVES} leaves")
        basis = np.asarray(basis, dtype=np.int64)
        restricted = self.words[:, basis] @ self.column_weights
        # row i of the RREF is the codeword restricting to e_i on the basis
        rows = [int(np.argmax(restricted == self.q ** (self.k - 1 - i))) for i in range(self.k)]
        coords = self.words[rows]
        keys = self.column_weights @ coords
        keys[basis] = -1
        signature = tuple(int(x) for x in np.sort(keys))
        if self.best is None or signature < self.best[0]:
            self.best = (signature, basis, keys, coords)
        elif signature == self.best[0]:
            self._record(self.order_of(basis, keys), self.order_of(self.best[1], self.best[2]))

    def _record(self, first: List[int], second: List[int]) -> None:
        """Equal remainders: D . first = D . second, so first . second^{-1} fixes D."""
        inverse = np.empty(self.N, dtype=np.int64)
        inverse[np.asarray(second, dtype=np.int64)] = np.arange(self.N)
        gamma = np.asarray(first, dtype=np.int64)[inverse]
        if np.array_equal(gamma, np.arange(self.N)):
            return
        if not np.array_equal(np.unique(self.words[:, gamma], axis=0), self.reference):
            raise InternalError("equal canonical leaves did not give an automorphism")
        self.automorphisms.append(gamma)


def canonical_form(code: LinearCode, force: bool = False) -> CanonicalForm:
    """Column-major lexicographically minimal RREF of D over admissible column orders."""
    _guard(code, force)
    small, is_dual = working_code(code)
    N, q, k = code.length, code.q, small.k
    if k == 0:
        return CanonicalForm(q=q, length=N, k=0, is_dual=is_dual,
                             columns=tuple(() for _ in range(N)), order=ColumnPerm.identity(N))

    search = _CanonicalSearch(codewords(small, force=force), q, k, force)
    basis, keys, coords = search.run()
    order = search.order_of(basis, keys)
    columns = tuple(tuple(int(x) for x in coords[:, c]) for c in order)
    logger.debug("canonical form of a [%d, %d] code: %d leaves, %d automorphisms",
                 N, k, search.leaves, len(search.automorphisms))
    return CanonicalForm(q=q, length=N, k=k, is_dual=is_dual, columns=columns,
                         order=ColumnPerm.from_array(order), leaves=search.leaves)


@dataclass(frozen=True)
class EquivWitness:
    """C2 = C1 . perm (gather), checked on codeword sets."""

    perm: ColumnPerm

    def to_json(self) -> List[int]:
        return self.perm.to_json()


def verify_witness(first: LinearCode, second: LinearCode, perm: ColumnPerm,
                   force: bool = False) -> bool:
    """Compare the codeword sets of (first . perm) and second on the smaller side."""
    if first.length != second.length or first.k != second.k or perm.N != first.length:
        return False
    small_first, _ = working_code(first)
    small_second, _ = working_code(second)
    moved = perm.apply(codewords(small_first, force=force))
    target = codewords(small_second, force=force)
    # codeword rows are distinct
    return np.array_equal(np.unique(moved, axis=0), np.unique(target, axis=0))


def are_perm_equivalent(first: LinearCode, second: LinearCode,
                        force: bool = False) -> Optional[EquivWitness]:
    """Witness pi with second = first . pi, or None."""
    if first.length != second.length:
        raise ParameterError(f"codes have lengths {first.length} and {second.length}")
    _guard(first, force)
    _guard(second, force)
    if first.q != second.q or first.k != second.k:
        return None
    if first == second:
        return _checked(first, second, ColumnPerm.identity(first.length), force)
    if compute_invariant(first, force) != compute_invariant(second, force):
        return None
    form1 = canonical_form(first, force)
    form2 = canonical_form(second, force)
    if form1.key != form2.key:
        return None
    return _checked(first, second, form1.order.compose(form2.order.inverse()), force)


def _checked(first: LinearCode, second: LinearCode, perm: ColumnPerm, force: bool) -> EquivWitness:
    if first.permuted(perm.image) != second or not verify_witness(first, second, perm, force):
        raise InternalError("equivalence witness failed verification")
    return EquivWitness(perm=perm)


def brute_force_equiv(first: LinearCode, second: LinearCode) -> Optional[EquivWitness]:
    """Scan all N! permutations comparing codeword sets (N <= 8)."""
    N = first.length
    if N > MAX_BRUTE_FORCE_LENGTH:
        raise SizeGuardError(f"brute force is limited to N <= {MAX_BRUTE_FORCE_LENGTH}, got {N}")
    if second.length != N:
        raise ParameterError(f"codes have lengths {N} and {second.length}")
    if first.q != second.q or first.k != second.k:
        return None

    small_first, _ = working_code(first)
    small_second, _ = working_code(second)
    words = codewords(small_first)
    target = np.sort(encode_words(codewords(small_second), first.q))
    everything = all_permutations(N)
    powers = first.q ** np.arange(N - 1, -1, -1, dtype=np.int64)
    for start in range(0, len(everything), CANDIDATE_BLOCK):
        block = everything[start:start + CANDIDATE_BLOCK]
        packed = np.sort(words[:, block] @ powers, axis=0)   # (Q, M)
        hits = np.flatnonzero((packed == target[:, np.newaxis]).all(axis=0))
        if hits.size:
            return EquivWitness(perm=ColumnPerm.from_array(block[hits[0]]))
    return None


def canonical_forms(codes: Sequence[LinearCode], workers: int = 1,
                    force: bool = False) -> List[CanonicalForm]:
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        return list(pool.map(lambda c: canonical_form(c, force), codes))


def partition_codes(codes: Sequence[LinearCode], workers: int = 1, force: bool = False,
                    forms: Optional[Sequence[CanonicalForm]] = None) -> List[List[int]]:
    """Indices of `codes` grouped by permutation equivalence, in first-seen order."""
    if forms is None:
        forms = canonical_forms(codes, workers=workers, force=force)
    groups: Dict[Tuple, List[int]] = {}
    for i, form in enumerate(forms):
        groups.setdefault(form.key, []).append(i)
    return list(groups.values())


def orbit_pair_witness(tower: Tower, alpha: int, beta: int) -> Optional[Tuple[int, int, ColumnPerm]]:
    """(zeta, j, rho) with C(alpha) . rho = C(beta), or None when no (zeta, j) is compatible.

    For a conjugate beta the pair (1, j) with beta^(q^j) = alpha and
    j = 0 mod n is taken, so rho is the identity.
    """
    quadruples = compatible_quadruples(tower, alpha, beta)
    if not quadruples:
        return None
    top = tower.top.GF
    n = tower.params.n
    zeta, j = next(((z, e) for z, e in quadruples
                    if z == 1 and e % n == 0 and tower.frobenius(top(int(beta)), e) == top(int(alpha))),
                   quadruples[0])
    return zeta, j, build_rho(tower, zeta, j, alpha, beta)


def verify_orbit_equivalence(tower: Tower, orbit) -> Dict:
    """Build and check a rho witness for every pair of roots in a T-orbit."""
    group = FieldGroup.of_tower(tower)
    n = tower.params.n
    members = list(orbit.members)
    report = {'rep': int(tower.top.log_table[orbit.rep]), 'size': len(members),
              'pairs': 0, 'verified': 0, 'fallbacks': 0, 'failures': [],
              'affine_witnesses': 0}
    for i, alpha in enumerate(members):
        code_alpha = cached_code(tower, alpha).code
        for beta in members[i + 1:]:
            report['pairs'] += 1
            code_beta = cached_code(tower, beta).code
            witness = orbit_pair_witness(tower, alpha, beta)
            if witness is None:
                report['fallbacks'] += 1
                if are_perm_equivalent(code_alpha, code_beta) is None:
                    report['failures'].append({'alpha': alpha, 'beta': beta, 'reason': 'not equivalent'})
                continue
            zeta, j, rho = witness
            decoded = membership_in_FG(group, rho)
            if code_alpha.permuted(rho.image) != code_beta:
                report['failures'].append({'alpha': alpha, 'beta': beta, 'reason': 'rho does not map C(alpha) onto C(beta)'})
            elif decoded is None:
                report['failures'].append({'alpha': alpha, 'beta': beta, 'reason': 'rho is not in FG'})
            elif j % n == 0 and not decoded.in_F:
                report['failures'].append({'alpha': alpha, 'beta': beta, 'reason': 'rho has a Frobenius part for j = 0 mod n'})
            else:
                report['verified'] += 1
                report['affine_witnesses'] += int(decoded.in_F)
    return report


@dataclass
class EquivClass:
    rep_root: int
    members: List[int]
    witnesses: List[ColumnPerm]

    def to_json(self, tower: Tower) -> Dict:
        log_table = tower.top.log_table
        return {
            'rep_root': int(log_table[self.rep_root]),
            'members': [int(log_table[a]) for a in self.members],
            'witnesses': [w.to_json() for w in self.witnesses],
        }


@dataclass
class Classification:
    params: Dict[str, int]
    root_count: int
    poly_count: int
    distinct_codes: int
    orbit_count: int
    classes: List[EquivClass]
    orbits_within_classes: bool

    @property
    def class_count(self) -> int:
        return len(self.classes)

    @property
    def gap(self) -> int:
        return self.orbit_count - self.class_count

    def to_json(self, tower: Tower) -> Dict:
        return {
            'params': self.params,
            'S': self.root_count,
            'P': self.poly_count,
            'distinct_codes': self.distinct_codes,
            'orbit_count': self.orbit_count,
            'class_count': self.class_count,
            'gap': self.gap,
            'orbits_within_classes': self.orbits_within_classes,
            'classes': [c.to_json(tower) for c in self.classes],
        }


def classify_omega(tower: Tower, workers: int = 1, force: bool = False) -> Classification:
    """Partition the codes C(alpha) into permutation-equivalence classes."""
    roots = root_set(tower, force=force)
    polys = poly_set(tower, roots)
    if len(polys) > MAX_CLASSIFY_POLYS and not force:
        raise SizeGuardError(f"|P| = {len(polys)} exceeds the classification guard of {MAX_CLASSIFY_POLYS}")

    # conjugate roots give equal codes; distinct codes keyed by value
    codes: Dict[LinearCode, List[int]] = {}
    for alpha in polys.reps:
        codes.setdefault(cached_code(tower, alpha).code, []).append(alpha)
    distinct = list(codes)
    logger.info("%d polynomials give %d distinct codes", len(polys), len(distinct))

    classes = []
    class_of_root = {}
    forms = canonical_forms(distinct, workers=workers, force=force)
    for group_indices in partition_codes(distinct, forms=forms):
        rep_index = group_indices[0]
        rep_code = distinct[rep_index]
        members, witnesses = [], []
        for i in group_indices:
            perm = forms[rep_index].order.compose(forms[i].order.inverse())
            witness = _checked(rep_code, distinct[i], perm, force)
            for alpha in codes[distinct[i]]:
                members.append(alpha)
                witnesses.append(witness.perm)
        rep_root = codes[rep_code][0]
        for alpha in members:
            class_of_root[alpha] = len(classes)
        classes.append(EquivClass(rep_root=rep_root, members=members, witnesses=witnesses))

    orbits = orbits_on_S(tower, roots)
    within = all(len({class_of_root[polys.reps[polys.root_index[a]]] for a in orbit.members}) == 1
                 for orbit in orbits)
    result = Classification(params=tower.params.as_dict(), root_count=len(roots),
                            poly_count=len(polys), distinct_codes=len(distinct),
                            orbit_count=len(orbits), classes=classes,
                            orbits_within_classes=within)
    if result.class_count > result.orbit_count:
        raise InternalError(f"{result.class_count} classes exceed {result.orbit_count} orbits")
    logger.info("(q=%d, n=%d, r=%d): %d orbits, %d classes", tower.params.q, tower.params.n,
                tower.params.r, result.orbit_count, result.class_count)
    return result


def classify_by_oracle(tower: Tower) -> List[List[LinearCode]]:
    """Classes of distinct codes using brute_force_equiv only (N <= 8)."""
    roots = root_set(tower)
    polys = poly_set(tower, roots)
    distinct = list(dict.fromkeys(cached_code(tower, alpha).code for alpha in polys.reps))
    classes: List[List[LinearCode]] = []
    for code in distinct:
        for members in classes:
            if brute_force_equiv(members[0], code) is not None:
                members.append(code)
                break
        else:
            classes.append([code])
    return classes


HEADLINE_COLUMNS = ['p', 'm', 'n', 'r', '|S|', '|P|', 'orbit_count', 'class_count', 'gap']


def headline_row(classification: Classification) -> Dict:
    params = classification.params
    return {
        'p': params['p'], 'm': params['m'], 'n': params['n'], 'r': params['r'],
        '|S|': classification.root_count,
        '|P|': classification.poly_count,
        'orbit_count': classification.orbit_count,
        'class_count': classification.class_count,
        'gap': classification.gap,
    }


def headline_table(classifications: Sequence[Classification]) -> pd.DataFrame:
    return pd.DataFrame([headline_row(c) for c in classifications], columns=HEADLINE_COLUMNS)


def synthetic_code(rng: np.random.Generator, N: int, k: int, q: int = 2) -> LinearCode:
    """Random [N, k] code of full rank k over GF(q)."""
    if not 0 <= k <= N:
        raise ParameterError(f"need 0 <= k <= N, got k={k}, N={N}")
    GF = galois.GF(q)
    while True:
        generator = GF(rng.integers(0, q, size=(k, N)))
        code = LinearCode.from_matrix(GF, generator, N)
        if code.k == k:
            return code
