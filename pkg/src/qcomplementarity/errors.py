class InputError(ValueError):
    """Raised for malformed or out-of-range inputs."""


class UnsupportedInputError(InputError):
    """Raised for valid inputs outside the implemented scope (e.g. a measured qutrit)."""
