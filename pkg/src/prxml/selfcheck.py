"""Randomized oracle-equivalence suites run by ``prxml selftest``."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .algorithms import poss_unordered_single, prob_ordered_local
from .matches import enumerate_matches, prob_explicit_local, prob_explicit_mie
from .oracle import enumerate_worlds
from .randomdocs import candidate_worlds, random_pdoc
from .rewrite import mie_to_cie, mux_to_mie


@dataclass
class SuiteResult:
    name: str
    checks: int
    failures: int

    @property
    def ok(self) -> bool:
        return self.failures == 0


def _ordered_dp(rng, rounds):
    checks = failures = 0
    for _ in range(rounds):
        d = random_pdoc(rng, ("mux", "ind", "det"), ordered=True)
        dist = enumerate_worlds(d)
        for w in candidate_worlds(rng, d, dist):
            checks += 1
            failures += prob_ordered_local(d, w) != dist.probability(w)
    return checks, failures


def _unordered_single(rng, rounds):
    checks = failures = 0
    for kinds, relaxed in ((("ind",), False), (("mux",), False), (("mux", "ind"), True)):
        for _ in range(rounds):
            d = random_pdoc(rng, kinds, no_ind_under_mux=True)
            dist = enumerate_worlds(d)
            for w in candidate_worlds(rng, d, dist):
                checks += 1
                failures += poss_unordered_single(d, w, relaxed=relaxed) != (dist.probability(w) > 0)
    return checks, failures


def _explicit(rng, rounds):
    checks = failures = 0
    for _ in range(rounds):
        for kinds, algo in ((("mux", "ind", "det"), prob_explicit_local), (("mie",), prob_explicit_mie)):
            d = random_pdoc(rng, kinds, ordered=rng.random() < 0.5)
            dist = enumerate_worlds(d)
            for w in candidate_worlds(rng, d, dist):
                checks += 1
                failures += algo(d, w, enumerate_matches(d, w)) != dist.probability(w)
    return checks, failures


def _rewrite(rng, rounds):
    checks = failures = 0
    for _ in range(rounds):
        d = random_pdoc(rng, ("mux",), ordered=rng.random() < 0.5)
        d1 = mux_to_mie(d)
        d2 = mie_to_cie(d1)
        checks += 1
        failures += not (enumerate_worlds(d) == enumerate_worlds(d1) == enumerate_worlds(d2))
    return checks, failures


SUITES = {
    "ordered-dp": _ordered_dp,
    "unordered-single": _unordered_single,
    "explicit-matches": _explicit,
    "rewrite": _rewrite,
}


def run_selftest(seed: int = 0, rounds: int = 40) -> list[SuiteResult]:
    results = []
    for name, suite in SUITES.items():
        rng = random.Random(f"{seed}:{name}")
        checks, failures = suite(rng, rounds)
        results.append(SuiteResult(name, checks, failures))
    return results
