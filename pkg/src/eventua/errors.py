"""Exception hierarchy shared by every layer of the engine."""


class EventuaError(Exception):
    """Base class for all engine errors."""


class ParseError(EventuaError):
    """Malformed input text.

    ``line`` is set for world files and scripts, ``pos`` (0-based character
    offset) for formula/term text, and ``expected`` lists the tokens that would
    have been accepted at the failure point.
    """

    def __init__(self, message, line=None, pos=None, expected=()):
        self.message = message
        self.line = line
        self.pos = pos
        self.expected = tuple(sorted(set(expected)))
        super().__init__(str(self))

    def __str__(self):
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.pos is not None:
            where.append(f"position {self.pos}")
        text = self.message
        if self.expected:
            text += f" (expected one of: {', '.join(self.expected)})"
        if where:
            text = f"{', '.join(where)}: {text}"
        return text


class WorldError(EventuaError):
    """A world declaration violates one of the world invariants."""


class StratumError(WorldError):
    pass


class DuplicateName(WorldError):
    pass


class ArityError(EventuaError):
    pass


class UnknownIndividual(WorldError):
    pass


class IncompleteFunction(WorldError):
    """A function graph is not total on the virtual individuals."""


class UnknownEvent(EventuaError):
    pass


class EvaluationError(EventuaError):
    pass


class UnboundVariable(EvaluationError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unbound variable {name}")


class UnknownFunction(EvaluationError):
    pass


class ApplicationOutsideGraph(EvaluationError):
    pass


class UnknownRelation(EvaluationError):
    pass


class NonNumericComparison(EvaluationError):
    pass


class TypeMismatch(EventuaError):
    pass


class UnknownName(EventuaError):
    pass


class NonIndividualConcept(EventuaError):
    pass


class TypeDefinitionError(EventuaError):
    pass


class UnknownRule(EventuaError):
    pass


class UnknownViewEvent(EventuaError):
    pass


class ShapeError(EventuaError):
    pass
