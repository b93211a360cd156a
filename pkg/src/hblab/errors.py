"""Exception hierarchy.

``RefusalError`` covers every case where the inputs violate a documented
hypothesis of an operation and the computation is refused outright; the CLI
maps these to exit code 2.  Anything else that escapes is an internal error
(exit code 1).
"""


class RefusalError(Exception):
    """Inputs violate a documented hypothesis; the computation is refused."""


class DomainError(RefusalError):
    """Argument outside the mathematical domain of the operation."""


class DegenerateSymbolError(RefusalError):
    """The requested symbol degenerates (e.g. outer factor identically zero)."""


class DegenerateTargetError(RefusalError):
    """A distance target carries essentially no mass."""


class SingularityError(RefusalError):
    """Evaluation requested on or too close to the singular support of an
    inner factor, or at a kernel pole."""


class UndersampledGridError(RefusalError):
    """Grid too coarse for the requested number of moments."""

    def __init__(self, m_given: int, m_required: int):
        super().__init__(
            f"grid size M={m_given} too small for the requested degree; "
            f"need M >= {m_required} (rule: M >= 4N + 4)"
        )
        self.m_given = m_given
        self.m_required = m_required


class NumericalInconsistencyError(RefusalError):
    """A certified structural property (positivity, unit bound) failed
    beyond its documented tolerance."""


class ConstructionInconsistencyError(NumericalInconsistencyError):
    """Computed symbol values exceed the unit bound beyond tolerance."""


class ScenarioFormatError(RefusalError):
    """A scenario or symbol document failed validation; message names the field."""
