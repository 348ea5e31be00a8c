"""Decision procedures for almost free algebras."""

from ._afa import BudgetExhausted, Error, Presentation

__all__ = ["BudgetExhausted", "Error", "Presentation"]
