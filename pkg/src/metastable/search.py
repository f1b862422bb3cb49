"""Search for rules that carry an initial state to a target state.

``random_search`` draws one rule per attempt, binds a fresh system, runs it
for the requested number of steps, and scores the final state against the
target. Each attempt draws from its own child stream of the seed
(``SeedSequence(seed, spawn_key=(k,))`` for attempt index k), so attempt k's
rule depends only on the seed and k. That makes runs reproducible however the
attempts are executed or distributed.

``exhaustive_search`` tries all 256 rules in order and returns every exact
solution, which also pins down how many exist.
"""

from __future__ import annotations

import dataclasses
from typing import Callable

import numpy as np

from . import ca, core
from .errors import DimensionMismatch, OutOfRange


@dataclasses.dataclass(frozen=True)
class Problem:
    """Initial state, target state, and how many steps lie between them."""

    init: np.ndarray
    target: np.ndarray
    steps: int

    @classmethod
    def from_strings(cls, init: str, target: str, steps: int) -> "Problem":
        init_vec = core.parse_state_string(init)
        target_vec = core.parse_state_string(target)
        if init_vec.size != target_vec.size:
            raise DimensionMismatch(
                "init has %d cells but target has %d" % (init_vec.size, target_vec.size)
            )
        if steps < 0:
            raise OutOfRange("step count must not be negative, got %d" % steps)
        return cls(init=init_vec, target=target_vec, steps=steps)


@dataclasses.dataclass(frozen=True)
class Attempt:
    """One evaluated candidate: 1-based index, rule number, match score."""

    index: int
    rule: int
    score: float


@dataclasses.dataclass
class SearchReport:
    """Outcome of a search: the solution if one turned up, else the best seen."""

    solution: int | None
    attempts: int
    best_rule: int
    best_score: float

    @property
    def solved(self) -> bool:
        return self.solution is not None


def rule_for_attempt(seed: int, index: int) -> int:
    """Rule drawn by attempt ``index`` (0-based) under ``seed``."""
    stream = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))
    return int(stream.integers(0, ca.RULE_COUNT))


def evaluate(rule: int, problem: Problem) -> float:
    """Bind the rule, run the problem's steps, and score the final state."""
    system = ca.make_automaton(rule, problem.init)
    final = core.run(system, problem.steps)[-1]
    return core.match(final, problem.target)


def random_search(
    problem: Problem,
    budget: int,
    seed: int,
    log: Callable[[Attempt], None] | None = None,
) -> SearchReport:
    """Draw up to ``budget`` rules at random, stopping at the first exact hit."""
    if budget < 1:
        raise OutOfRange("attempt budget must be at least 1, got %d" % budget)
    best_rule = -1
    best_score = -1.0
    for k in range(budget):
        rule = rule_for_attempt(seed, k)
        score = evaluate(rule, problem)
        if log is not None:
            log(Attempt(index=k + 1, rule=rule, score=score))
        if score > best_score:
            best_rule = rule
            best_score = score
        if score == 1.0:
            return SearchReport(solution=rule, attempts=k + 1, best_rule=rule, best_score=1.0)
    return SearchReport(solution=None, attempts=budget, best_rule=best_rule, best_score=best_score)


def exhaustive_search(
    problem: Problem,
    log: Callable[[Attempt], None] | None = None,
) -> list[int]:
    """Score all 256 rules in order; return every rule that hits the target."""
    solutions = []
    for rule in range(ca.RULE_COUNT):
        score = evaluate(rule, problem)
        if log is not None:
            log(Attempt(index=rule + 1, rule=rule, score=score))
        if score == 1.0:
            solutions.append(rule)
    return solutions
