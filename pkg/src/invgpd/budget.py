"""Enumeration budget shared by all backtracking searches.

A ``Budget`` counts candidate assignments across one logical operation.
Exceeding it raises :class:`~invgpd.errors.BudgetExceeded`; a search never
degrades into a silent partial answer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import BudgetExceeded

DEFAULT_BUDGET = 10**7


@dataclass
class Budget:
    limit: int = DEFAULT_BUDGET
    used: int = field(default=0, compare=False)

    def spend(self, amount: int = 1) -> None:
        self.used += amount
        if self.used > self.limit:
            raise BudgetExceeded(
                f"enumeration budget exceeded ({self.used} > {self.limit} candidates)"
            )


def ensure_budget(budget: Budget | int | None) -> Budget:
    """Coerce ``None`` or a raw limit into a fresh ``Budget``."""
    if budget is None:
        return Budget()
    if isinstance(budget, int):
        return Budget(limit=budget)
    return budget
