class DCError(Exception):
    """Base class for every error raised by the data-collaboration package"""


class DimensionMismatchError(DCError, ValueError):
    pass


class DegenerateDataError(DCError, ValueError):
    pass


class RankDeficiencyError(DCError, ValueError):
    pass


class InsufficientSourceError(DCError, ValueError):
    pass


class DivisibilityError(DCError, ValueError):
    pass


class MissingLabelError(DCError, ValueError):
    pass


class InvalidGraphError(DCError, ValueError):
    pass


class IndefiniteConstraintError(DCError):
    pass


class NonFiniteError(DCError, ValueError):
    pass


class InsufficientPoolError(DCError, ValueError):
    pass


class TooFewLeaksError(DCError, ValueError):
    pass


class EmptyEvaluationError(DCError, ValueError):
    pass


class LabelNotPresentError(DCError, ValueError):
    pass


class AllAttacksFailedError(DCError):
    pass


class PartyIndexError(DCError, IndexError):
    pass


class DatasetFormatError(DCError, ValueError):
    pass


class ConfigError(DCError, ValueError):
    pass
