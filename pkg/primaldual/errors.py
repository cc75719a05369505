"""Exception hierarchy."""


class PrimalDualError(Exception):
    """Base class for every error raised by the toolkit."""


class ShapeError(PrimalDualError, ValueError):
    """A vector does not have the length an operator or problem expects."""


class ParameterError(PrimalDualError, ValueError):
    """A numeric parameter is outside its admissible range."""


class ConstructionError(PrimalDualError, ValueError):
    """An operator or problem cannot be built from the given inputs."""


class DataError(PrimalDualError, ValueError):
    """Input data violates a modelling assumption (labels, graph symmetry)."""


class PreconditionError(PrimalDualError):
    """An operation was called in a state where it is not defined."""


class EstimatorStateError(PreconditionError):
    """A gradient estimator was used before being reset."""


class ParseError(PrimalDualError):
    """A file could not be parsed.

    Carries the byte offset (binary formats) or the 1-based line number
    (text formats) where parsing failed.
    """

    def __init__(self, message, offset=None, line=None):
        where = ''
        if offset is not None:
            where = f' at byte {offset}'
        elif line is not None:
            where = f' on line {line}'
        super().__init__(f'{message}{where}')
        self.offset = offset
        self.line = line


class DivergenceError(PrimalDualError):
    """Iterates became non-finite or exceeded the norm cap."""

    def __init__(self, iteration, detail='non-finite iterate'):
        super().__init__(f'divergence at iteration {iteration}: {detail}')
        self.iteration = iteration


class DiagnosticFailure(PrimalDualError):
    """A descent or residual bound failed beyond tolerance."""

    def __init__(self, iteration, bound, lhs, rhs):
        super().__init__(
            f'{bound} violated at iteration {iteration}: {lhs:.17g} > {rhs:.17g}')
        self.iteration = iteration
        self.bound = bound
        self.lhs = lhs
        self.rhs = rhs
