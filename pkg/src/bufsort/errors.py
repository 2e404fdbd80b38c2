"""Exception hierarchy shared by every solver module."""


class BufsortError(Exception):
    """Base class for all errors raised by :mod:`bufsort`."""


class InvalidInstance(BufsortError, ValueError):
    pass


class DeadDecision(BufsortError):
    """A program chose a color that has no item in the buffer."""

    def __init__(self, step, color):
        super().__init__(f"decision {step}: color {color} is not in the buffer")
        self.step = step
        self.color = color


class IncompleteProgram(BufsortError):
    def __init__(self, remaining):
        super().__init__(f"program ended with {remaining} unserved items")
        self.remaining = remaining


class InfeasibleOrder(BufsortError):
    """A serving order places an item before it can have entered the buffer."""

    def __init__(self, position, item, message=None):
        super().__init__(
            message or f"item {item} served at position {position} before entering the buffer"
        )
        self.position = position
        self.item = item


class BudgetExceeded(BufsortError):
    def __init__(self, states_visited, message=None):
        super().__init__(message or f"search budget exceeded after {states_visited} states")
        self.states_visited = states_visited


class WrongBufferSize(BufsortError, ValueError):
    pass


class ReconstructionFailure(BufsortError):
    pass


class ModelTooLarge(BufsortError):
    pass


class LpInfeasible(BufsortError):
    pass


class SolverStalled(BufsortError):
    pass


class BadEpsilon(BufsortError, ValueError):
    pass


class WitnessFailed(BufsortError):
    pass
