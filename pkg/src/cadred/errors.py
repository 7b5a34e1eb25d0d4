"""Exception hierarchy shared by every module."""


class CadError(Exception):
    """Base class for all library errors."""


class InputError(CadError):
    """Malformed user input: bad documents, bad indices, bad parameters."""


# algebra

class ArityMismatch(InputError):
    pass


class DomainError(CadError):
    def __init__(self, term, point, message="value outside the domain"):
        super().__init__(f"{message}: {term} at {point}")
        self.term = term
        self.point = point


class IndeterminateSign(CadError):
    pass


class ZeroPolynomial(InputError):
    pass


class UndecidableAtom(CadError):
    def __init__(self, atom, point):
        super().__init__(f"cannot decide {atom} at {point}")
        self.atom = atom
        self.point = point


class ParseError(InputError):
    pass


# cad-core

class BadIndex(InputError):
    pass


class BadLevel(InputError):
    pass


class NoRationalWitness(CadError):
    pass


class AdaptednessViolation(CadError):
    def __init__(self, index, set_position, points):
        super().__init__(
            f"cell {index} is not adapted to set #{set_position}: samples {points} disagree")
        self.index = index
        self.set_position = set_position
        self.points = points


class SectionOutOfRange(InputError):
    pass


# tree-rewrite and reduction-engine

class NotReducible(CadError):
    pass


class NotLiftable(CadError):
    pass


class PlanExhausted(CadError):
    pass


class LimitExceeded(CadError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class IncompleteDag(CadError):
    pass


# lowdim

class IncomparableEndpoints(CadError):
    pass


class NonPolynomialFiber(CadError):
    pass


# oracle and corpus

class TooLarge(InputError):
    pass


class UnknownEntry(InputError):
    pass


class BadParameter(InputError):
    pass
