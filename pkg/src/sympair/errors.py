"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class SympairError(Exception):
    """Base class. ``exit_code`` is what the CLI returns for it."""

    exit_code = 3


class CapExceededError(SympairError):
    exit_code = 2


class SpecParseError(SympairError):
    exit_code = 2

    def __init__(self, message, text="", pos=0, expected=()):
        self.text = text
        self.pos = pos
        self.line = text.count("\n", 0, pos) + 1
        self.column = pos - (text.rfind("\n", 0, pos) + 1) + 1
        self.expected = tuple(expected)
        detail = f"{message} at line {self.line}, column {self.column}"
        if self.expected:
            detail += f" (expected {' or '.join(self.expected)})"
        super().__init__(detail)


class ArityError(SpecParseError):
    pass


class ParameterDomainError(SpecParseError):
    pass


class UnknownInvolutionError(SympairError, KeyError):
    """No involution of that name in the standard catalog of the group."""

    exit_code = 2

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class BackendMismatchError(SympairError):
    exit_code = 2


class NotNormalError(SympairError):
    pass


class NotInvariantError(SympairError):
    pass


class NonLinearCharacterError(SympairError):
    pass


class SubgroupMismatchError(SympairError):
    pass


class EvenOrderError(SympairError):
    pass


class SplittingPrimeError(SympairError):
    pass


class PreconditionError(SympairError):
    pass


class NotAutomorphismError(SympairError):
    pass


class VerificationError(SympairError):
    """A computed identity that must hold did not. Never patched over."""

    def __init__(self, message, step=None, instance=None):
        self.step = step
        self.instance = instance
        super().__init__(message)


class ConfigError(SympairError):
    """Malformed configuration, such as a bad SYMPAIR_CAPS value."""
    exit_code = 2
