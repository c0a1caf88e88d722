"""Exception hierarchy shared by every module of the package."""


class WalkError(Exception):
    """Base class for all errors raised by twocoin."""


class PreconditionError(WalkError, ValueError):
    """A caller-supplied parameter violates a protocol precondition."""


class ZeroStateError(PreconditionError):
    pass


class LabelError(PreconditionError):
    pass


class SpaceMismatchError(PreconditionError):
    pass


class BasisError(PreconditionError):
    pass


class CoverageError(PreconditionError):
    pass


class UnitarityError(PreconditionError):
    pass


class ContractError(PreconditionError):
    pass


class ArenaError(PreconditionError):
    pass


class TargetError(PreconditionError):
    pass


class MethodError(PreconditionError):
    pass


class ParityError(PreconditionError):
    pass


class CoprimalityError(PreconditionError):
    pass


class ConfigError(PreconditionError):
    pass


class SizeError(WalkError):
    """Dense oracle guard rail: flattened dimension too large."""


class InfeasibleError(WalkError):
    """The oracle could not find local recovery unitaries (final state is not a product)."""
