"""Exception hierarchy shared by every tropicalis module."""


class TropicalisError(Exception):
    """Base class for all library errors."""


class DomainError(TropicalisError, ValueError):
    """A value or parameter lies outside the admissible domain."""


class NotInvertibleError(DomainError):
    pass


class NoBoundError(DomainError):
    """A requested sup/inf does not exist in the carrier."""


class UnsupportedCarrierError(DomainError):
    pass


class ShapeError(TropicalisError, ValueError):
    pass


class SizeError(TropicalisError, ValueError):
    pass


class AxiomViolation(TropicalisError):
    def __init__(self, axiom, witness, message=None):
        self.axiom = axiom
        self.witness = tuple(witness)
        super().__init__(message or f"{axiom} violated at {self.witness}")


class RegularityError(TropicalisError):
    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class DivergenceError(TropicalisError):
    """Kleene star / Bellman iteration does not stabilize.

    ``cycle`` holds the node indices of a witness cycle when one was found.
    """

    def __init__(self, message, cycle=None):
        self.cycle = list(cycle) if cycle is not None else None
        super().__init__(message)


class GraphError(TropicalisError, ValueError):
    pass


class ZeroFunctionalError(DomainError):
    pass


class InconsistentPrescriptionError(DomainError):
    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class NotSeparableError(DomainError):
    pass


class ParseError(TropicalisError, ValueError):
    pass
