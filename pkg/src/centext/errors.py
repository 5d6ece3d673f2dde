"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: InputError -> 2, ResourceCapError -> 3,
VerificationFailure and StructuralError -> 1.
"""


class CentextError(Exception):
    pass


class InputError(CentextError, ValueError):
    """Malformed or out-of-contract input."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ResourceCapError(CentextError, RuntimeError):
    """An enumeration would exceed its configured size cap."""

    def __init__(self, message, cap):
        super().__init__(f"{message} (cap={cap})")
        self.cap = cap


class StructuralError(CentextError):
    """Data that claims a structure it does not have (e.g. a non-central bundle)."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class VerificationFailure(CentextError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
