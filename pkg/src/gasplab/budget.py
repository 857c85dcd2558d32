"""Work budgets for the exhaustive checkers.

The brute-force oracles refuse to enumerate past a step limit instead of
hanging.  The limit comes from the explicit argument if given, then the
GASPLAB_BUDGET environment variable, then the per-caller fallback.
"""

import os

from .errors import BudgetError

DEFAULT_BUDGET = 10 ** 7


def resolve_budget(budget=None, fallback=DEFAULT_BUDGET):
    if budget is not None:
        return int(budget)
    env = os.environ.get("GASPLAB_BUDGET", "").strip()
    if env:
        return int(env)
    return fallback


class WorkMeter:
    """Counts enumeration steps and refuses to go past the limit."""

    __slots__ = ("limit", "spent")

    def __init__(self, limit):
        self.limit = limit
        self.spent = 0

    def tick(self, n=1):
        self.spent += n
        if self.spent > self.limit:
            raise BudgetError(
                f"work budget exceeded: {self.spent} > {self.limit} steps")
