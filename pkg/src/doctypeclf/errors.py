"""Exception hierarchy.

Every error carries a ``category`` used by the CLI to pick an exit code and to
print a one-line machine-parsable message.
"""


class DoctypeError(Exception):
    category = "validation"


class ValidationError(DoctypeError):
    category = "validation"


class InputNotFound(DoctypeError):
    category = "input-not-found"


class ApiError(DoctypeError):
    category = "api"


# records
class MalformedDoi(ValidationError):
    pass


# harvest
class MissingDoi(ValidationError):
    pass


class MalformedRecord(ValidationError):
    pass


class EmptyTypeList(ValidationError):
    pass


class DuplicateKeyInStore(ValidationError):
    pass


class RateLimited(ApiError):
    pass


class ApiSchemaError(ApiError):
    pass


class NetworkError(ApiError):
    pass


# label
class UnknownClass(ValidationError):
    pass


class DuplicateType(ValidationError):
    pass


# datasets
class EmptyClass(ValidationError):
    pass


# learn
class SingleClassInput(ValidationError):
    pass


class InvalidHyper(ValidationError):
    pass


class MalformedModel(ValidationError):
    pass


class GridExhausted(ValidationError):
    pass


# evaluate
class KeyMismatch(ValidationError):
    pass
