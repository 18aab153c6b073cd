"""Exception types shared across the package."""


class SymrefineError(Exception):
    """Base class for all package errors."""


class BudgetExceededError(SymrefineError):
    """An exhaustive computation would visit more profiles than allowed."""

    def __init__(self, needed, budget, what):
        super().__init__(
            f"{what} needs {needed} profile visits, exceeding the budget of {budget}"
        )
        self.needed = needed
        self.budget = budget


class NonRegularGroupError(SymrefineError):
    """A computation that requires a regular group met a stabilizer it cannot handle."""

    def __init__(self, orbit_id, reason):
        super().__init__(f"orbit {orbit_id}: {reason}")
        self.orbit_id = orbit_id
        self.reason = reason


class InconsistentRuleError(SymrefineError):
    """A rule failed the group-consistency precondition; carries the witness."""

    def __init__(self, rule_name, witness):
        profile, element = witness
        super().__init__(
            f"rule {rule_name} is not consistent with the group; "
            f"violated at element {element} on a witness profile"
        )
        self.witness = witness


class EmptyChoiceSetError(SymrefineError):
    """A per-orbit choice set came out empty (broken preconditions upstream)."""

    def __init__(self, orbit_id):
        super().__init__(f"empty choice set at orbit {orbit_id}")
        self.orbit_id = orbit_id
