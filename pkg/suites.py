"""
Acceptance Suites

Seven desk-scale checks run by `cli.py --cmd verify` and by
scripts/run_all_checks.py. Each suite returns a SuiteResult; a failure
record is a falsification event, never a tolerated state.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from actions import (
    correspondence_check, orbits_by_full_group, orbits_on_P, orbits_on_S, poly_set, root_set,
)
from equiv import (
    are_perm_equivalent, brute_force_equiv, classify_by_oracle, classify_omega, headline_row,
    synthetic_code, verify_orbit_equivalence,
)
from ff_tower import IncompatibleQuadrupleError, Params, as_ints, build_tower
from goppa import (
    cached_code, check_goppa_condition, check_r_equations, min_distance, weight_enumerator,
)
from perms import (
    ColumnPerm, FieldGroup, affine_embed, build_rho, compatible_quadruples, exhaustive_row_matches,
    fg_in_alternating, membership_in_FG, parity_table, perm_of_semiaffine, rho_target,
    transvection_perm,
)

logger = logging.getLogger(__name__)

PARITY_PAIRS = [(2, 2), (2, 3), (2, 4), (4, 2), (3, 2), (5, 2)]

# AΓL(1,4) is S_4 and x -> x^2 swaps the two elements outside GF(2)
PARITY_EXCEPTIONS = {(2, 2): False}

CLASSIFICATION_PARAMS = [(2, 1, 3, 2), (2, 1, 2, 2), (3, 1, 2, 2), (2, 2, 2, 2), (3, 1, 2, 3)]

# Triples whose codes split into several orbits and classes
KNOWN_SPLITS = {
    (3, 1, 2, 3): {'orbit_sizes': [432, 216, 72], 'class_count': 3},
}

SYNTHETIC_SEED = 20240531
SYNTHETIC_COUNT = 100


@dataclass
class SuiteResult:
    name: str
    passed: bool = True
    checks: int = 0
    failures: List[Dict] = field(default_factory=list)
    details: Dict = field(default_factory=dict)
    seconds: float = 0.0
    table: Optional[pd.DataFrame] = field(default=None, repr=False)

    def check(self, ok: bool, **record) -> bool:
        self.checks += 1
        if not ok:
            self.passed = False
            self.failures.append(record)
        return ok

    def to_json(self, include_timings: bool = True) -> Dict:
        doc = {'name': self.name, 'passed': self.passed, 'checks': self.checks,
               'failures': self.failures, 'details': self.details}
        if include_timings:
            doc['seconds'] = round(self.seconds, 3)
        return doc


def _tower(p: int, m: int, n: int, r: int):
    return build_tower(Params(p, m, n, r))


def suite_construction(workers: int = 1, progress: bool = False) -> SuiteResult:
    """|S|, |P|, [N, k, d] and agreement of the two membership tests on (2,1,3,2)."""
    result = SuiteResult('construction')
    tower = _tower(2, 1, 3, 2)
    roots = root_set(tower)
    polys = poly_set(tower, roots)
    result.check(len(roots) == 56, check='|S|', got=len(roots), expected=56)
    result.check(len(polys) == 28, check='|P|', got=len(polys), expected=28)

    N = tower.params.N
    unit_vectors = np.eye(N, dtype=np.int64)
    for alpha in polys.reps:
        goppa_code = cached_code(tower, alpha)
        code = goppa_code.code
        result.check(code.length == 8 and code.k == 2, check='[N, k]', alpha=alpha,
                     got=[code.length, code.k])
        result.check(min_distance(code) == 5, check='d', alpha=alpha, got=min_distance(code))
        for row in code.generator:
            by_congruence = check_goppa_condition(tower, row, goppa_code.g)
            by_equations = check_r_equations(tower, row, alpha)
            result.check(by_congruence and by_equations, check='generator row', alpha=alpha, row=list(row))
        for vector in unit_vectors:
            result.check(check_goppa_condition(tower, vector, goppa_code.g)
                         == check_r_equations(tower, vector, alpha),
                         check='agreement on weight-1 vector', alpha=alpha)
    result.details = {'S': len(roots), 'P': len(polys)}
    return result


def suite_orbit_witnesses(workers: int = 1, progress: bool = False) -> SuiteResult:
    """A verified rho witness for every pair of roots in every T-orbit."""
    result = SuiteResult('orbit-witnesses')
    for params in [(2, 1, 3, 2), (2, 1, 2, 2)]:
        tower = _tower(*params)
        orbits = orbits_on_S(tower)
        pairs = 0
        for orbit in orbits:
            report = verify_orbit_equivalence(tower, orbit)
            pairs += report['pairs']
            result.check(not report['failures'] and report['fallbacks'] == 0,
                         params=list(params), rep=report['rep'],
                         failures=report['failures'], fallbacks=report['fallbacks'])
        result.details[str(params)] = {'orbits': len(orbits), 'pairs': pairs}
    return result


def _rho_targets(tower, alpha: int) -> List[Tuple[int, int, int]]:
    """Compatible (zeta, j, beta) for alpha: the pure Frobenius case plus
    three more from alpha's orbit."""
    n, r = tower.params.n, tower.params.r
    frobenius_case = int(tower.frobenius(tower.top.GF(alpha), n * r - 1))
    targets = [(1, 1, frobenius_case)]
    orbit = next(o for o in orbits_on_S(tower) if alpha in o.members)
    for beta in orbit.members:
        if len(targets) >= 4:
            break
        quadruples = compatible_quadruples(tower, alpha, beta)
        if quadruples and beta != alpha:
            zeta, j = quadruples[-1]
            targets.append((zeta, j, beta))
    return targets


def suite_rho_exhaustive(workers: int = 1, progress: bool = False) -> SuiteResult:
    """Every permutation carrying H_alpha onto zeta * H_beta^(q^j) lies in FG (8! scan)."""
    result = SuiteResult('rho-exhaustive')
    tower = _tower(2, 1, 3, 2)
    group = FieldGroup.of_tower(tower)
    roots = root_set(tower)
    alpha = int(roots.roots[0])
    row = cached_code(tower, alpha).row.as_ints()

    scanned = []
    for zeta, j, beta in _rho_targets(tower, alpha):
        target = rho_target(tower, zeta, j, beta)
        matches = exhaustive_row_matches(row, as_ints(target),
                                         workers=workers, progress=progress)
        result.check(len(matches) >= 1, check='match exists', zeta=zeta, j=j, beta=beta)
        expected = build_rho(tower, zeta, j, alpha, beta)
        for pi in matches:
            decoded = membership_in_FG(group, pi)
            result.check(decoded is not None, check='member of FG', perm=pi.to_json())
            result.check(pi == expected, check='equals constructed rho', perm=pi.to_json())
        scanned.append({'zeta': zeta, 'j': j, 'beta': beta, 'matches': len(matches)})

    # a beta outside alpha's orbit cannot be reached by any permutation
    orbit = next(o for o in orbits_on_S(tower) if alpha in o.members)
    outside = [int(b) for b in roots.roots if int(b) not in orbit.members]
    if outside:
        beta = outside[0]
        try:
            build_rho(tower, 1, 0, alpha, beta)
            incompatible = False
        except IncompatibleQuadrupleError:
            incompatible = True
        if incompatible:
            target = rho_target(tower, 1, 0, beta)
            matches = exhaustive_row_matches(row, as_ints(target),
                                             workers=workers, progress=progress)
            result.check(not matches, check='no match for incompatible target', beta=beta,
                         matches=[m.to_json() for m in matches])
            scanned.append({'zeta': 1, 'j': 0, 'beta': beta, 'matches': len(matches)})
    result.details = {'alpha': alpha, 'targets': scanned}
    return result


def suite_parity(workers: int = 1, progress: bool = False) -> SuiteResult:
    """Alternating-group containment, translation and Singer-cycle parities."""
    result = SuiteResult('parity')
    table = {}
    for q, n in PARITY_PAIRS:
        observed = fg_in_alternating(q, n)
        expected = PARITY_EXCEPTIONS.get((q, n), q % 2 == 0)
        table[f"{q},{n}"] = observed
        result.check(observed == expected, check='fg_in_alternating', q=q, n=n,
                     got=observed, expected=expected)

    for d in (2, 3, 4):
        group = FieldGroup.of_field(2, d)
        for b in range(1, group.N):
            pi = perm_of_semiaffine(group, group.map(1, b, 0))
            result.check(pi.cycle_type() == (2,) * 2 ** (d - 1), check='translation cycle type',
                         d=d, b=b, got=list(pi.cycle_type()))
        if d >= 3:
            pi = transvection_perm(group, 1, [0, 1] + [0] * (d - 2))
            result.check(pi.cycle_type().count(2) == 2 ** (d - 2) and pi.sign() == 1,
                         check='transvection', d=d, got=list(pi.cycle_type()))

    group = FieldGroup.of_field(3, 2)
    mu = perm_of_semiaffine(group, group.generators()['mu'])
    result.check(mu.sign() == -1 and mu.cycle_type() == (8, 1), check='Singer cycle on GF(9)',
                 got=list(mu.cycle_type()))
    generators = parity_table(PARITY_PAIRS)
    for (q, n), rows in generators.groupby(['q', 'n']):
        result.check(bool((rows['sign'] == 1).all()) == table[f"{q},{n}"],
                     check='generator signs', q=int(q), n=int(n))
    result.table = generators
    result.details = {
        'fg_in_alternating': table,
        'exceptions': {f"{q},{n}": v for (q, n), v in PARITY_EXCEPTIONS.items()},
        'generators': [{'q': int(row.q), 'n': int(row.n), 'generator': row.generator,
                        'cycle_type': row.cycle_type, 'sign': int(row.sign)}
                       for row in generators.itertuples(index=False)],
    }
    return result


def suite_agl_embedding(workers: int = 1, progress: bool = False) -> SuiteResult:
    """AΓL(1,q^n) -> AGL(nm, p) is a homomorphism; translations land on translations."""
    result = SuiteResult('agl-embedding')
    for q, n in [(2, 3), (3, 2), (2, 4), (4, 2)]:
        group = FieldGroup.of_field(q, n)
        generators = list(group.generators().values())
        for g1 in generators:
            for g2 in generators:
                composed = affine_embed(group, group.compose(g1, g2))
                product = affine_embed(group, g1).compose(affine_embed(group, g2))
                result.check(composed == product, check='homomorphism', q=q, n=n,
                             g1=g1.to_json(), g2=g2.to_json())
        for psi in group.elements():
            rep = affine_embed(group, psi)
            is_translation = psi.scale == 1 and psi.frob_exp == 0
            result.check(rep.is_translation() == is_translation, check='translation subgroup',
                         q=q, n=n, psi=psi.to_json())
            if is_translation:
                result.check(rep.vector == group.ctx.coeffs(psi.shift), check='translation vector',
                             q=q, n=n, psi=psi.to_json())
        result.details[f"{q},{n}"] = {'group_order': group.size}

    # the column action is a faithful homomorphism on q^n = 8
    group = FieldGroup.of_field(2, 3)
    elements = list(group.elements())
    perms = {psi: perm_of_semiaffine(group, psi) for psi in elements}
    result.check(len(set(perms.values())) == len(elements), check='faithful column action')
    for psi1 in elements:
        for psi2 in elements:
            result.check(perms[group.compose(psi1, psi2)] == perms[psi1].compose(perms[psi2]),
                         check='column homomorphism', psi1=psi1.to_json(), psi2=psi2.to_json())

    # trivial kernel on q^n = 16, over F_2 and over F_4
    for q, n in [(2, 4), (4, 2)]:
        group = FieldGroup.of_field(q, n)
        images = {perm_of_semiaffine(group, psi) for psi in group.elements()}
        result.check(len(images) == group.size, check='faithful column action', q=q, n=n,
                     distinct=len(images), expected=group.size)
    return result


def _permuted_partner(rng: np.random.Generator, code):
    pi = ColumnPerm.from_array(rng.permutation(code.length))
    return code.permuted(pi.image)


def suite_oracle_equivalence(workers: int = 1, progress: bool = False) -> SuiteResult:
    """are_perm_equivalent agrees with the N! scan on all Goppa pairs and synthetic codes."""
    result = SuiteResult('oracle-equivalence')
    tower = _tower(2, 1, 3, 2)
    polys = poly_set(tower, root_set(tower))
    codes = [cached_code(tower, alpha).code for alpha in polys.reps]

    pairs = [(codes[i], codes[j]) for i in range(len(codes)) for j in range(i + 1, len(codes))]
    rng = np.random.default_rng(SYNTHETIC_SEED)
    for index in range(SYNTHETIC_COUNT):
        k = int(rng.integers(1, 8))
        code = synthetic_code(rng, 8, k)
        partner = _permuted_partner(rng, code) if index % 2 == 0 else synthetic_code(rng, 8, k)
        pairs.append((code, partner))

    agreements = {'equivalent': 0, 'inequivalent': 0}
    for first, second in pairs:
        fast = are_perm_equivalent(first, second)
        slow = brute_force_equiv(first, second)
        result.check((fast is None) == (slow is None), check='oracle agreement',
                     first=first.to_json(), second=second.to_json())
        agreements['equivalent' if slow is not None else 'inequivalent'] += 1
    result.details = {'goppa_pairs': len(codes) * (len(codes) - 1) // 2,
                      'synthetic_pairs': SYNTHETIC_COUNT, **agreements}
    return result


def suite_classification(workers: int = 1, progress: bool = False,
                         params_list: Optional[Sequence[Tuple[int, int, int, int]]] = None) -> SuiteResult:
    """class_count <= orbit_count and the S/P orbit correspondence on every triple."""
    result = SuiteResult('classification')
    rows = []
    for params in params_list or CLASSIFICATION_PARAMS:
        tower = _tower(*params)
        roots = root_set(tower)
        polys = poly_set(tower, roots)
        orbits_S = orbits_on_S(tower, roots)
        orbits_P = orbits_on_P(tower, polys)
        result.check(correspondence_check(orbits_S, orbits_P, polys), check='orbit correspondence',
                     params=list(params))
        full = orbits_by_full_group(tower, roots)
        result.check(sorted(o.members for o in full) == sorted(o.members for o in orbits_S),
                     check='closure oracle', params=list(params))

        classification = classify_omega(tower, workers=workers)
        result.check(classification.class_count <= classification.orbit_count,
                     check='class_count <= orbit_count', params=list(params))
        result.check(classification.orbits_within_classes, check='orbits inside classes',
                     params=list(params))
        expected = KNOWN_SPLITS.get(tuple(params))
        if expected:
            sizes = sorted((o.size for o in orbits_S), reverse=True)
            result.check(sizes == expected['orbit_sizes'], check='orbit sizes',
                         params=list(params), got=sizes, expected=expected['orbit_sizes'])
            result.check(classification.class_count == expected['class_count'], check='class count',
                         params=list(params), got=classification.class_count,
                         expected=expected['class_count'])
            enumerators = {tuple(weight_enumerator(cached_code(tower, c.rep_root).code))
                           for c in classification.classes}
            result.check(len(enumerators) == classification.class_count,
                         check='class representatives have distinct weight enumerators',
                         params=list(params), enumerators=sorted(list(e) for e in enumerators))
        if tower.params.N <= 8:
            oracle = classify_by_oracle(tower)
            result.check(len(oracle) == classification.class_count, check='oracle classification',
                         params=list(params), oracle=len(oracle), got=classification.class_count)
        rows.append(headline_row(classification))
    result.details = {'headline': rows}
    return result


SUITES: Dict[str, Callable[..., SuiteResult]] = {
    'construction': suite_construction,
    'orbit-witnesses': suite_orbit_witnesses,
    'rho-exhaustive': suite_rho_exhaustive,
    'parity': suite_parity,
    'agl-embedding': suite_agl_embedding,
    'oracle-equivalence': suite_oracle_equivalence,
    'classification': suite_classification,
}


def run_suites(names: Optional[Sequence[str]] = None, workers: int = 1,
               progress: bool = False) -> List[SuiteResult]:
    results = []
    for name in names or list(SUITES):
        if name not in SUITES:
            raise KeyError(name)
        logger.info("Running suite %s", name)
        start = time.perf_counter()
        suite = SUITES[name](workers=workers, progress=progress)
        suite.seconds = time.perf_counter() - start
        logger.info("Suite %s: %s (%d checks, %.1fs)", name,
                    'passed' if suite.passed else 'FAILED', suite.checks, suite.seconds)
        results.append(suite)
    return results
