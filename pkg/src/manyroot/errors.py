"""Exception hierarchy shared by every manyroot module."""


class ManyRootError(Exception):
    """Base class for all errors raised by this package."""


class InvalidModulusError(ManyRootError, ValueError):
    pass


class UndefinedGcdError(ManyRootError, ValueError):
    pass


class NotInvertibleError(ManyRootError, ValueError):
    """Raised when an inverse does not exist.

    ``gcd`` is the common factor of the value and the modulus. For a
    semiprime modulus this is one of the private primes.
    """

    def __init__(self, value, modulus, gcd):
        super().__init__(f"{value} is not invertible mod {modulus} (gcd={gcd})")
        self.value = value
        self.modulus = modulus
        self.gcd = gcd


class NonCoprimeModuliError(ManyRootError, ValueError):
    pass


class NotPrimeError(ManyRootError, ValueError):
    pass


class ParamsRejected(ManyRootError, ValueError):
    """A (p, q, x) triple failed validation; ``reason`` is a stable code."""

    def __init__(self, reason, message):
        super().__init__(message)
        self.reason = reason


class OutOfRangeError(ManyRootError, ValueError):
    pass


class ScaleGuardError(ManyRootError):
    """The requested computation exceeds the configured brute-force scale."""


class TagIncompatibleError(ManyRootError, ValueError):
    """The message and cipher disagree mod p, so the tag is not an integer."""

    def __init__(self, m_mod_p, c_mod_p, p):
        super().__init__(
            f"tag not integral: m = {m_mod_p} (mod {p}) but c = {c_mod_p} (mod {p}); "
            "parameters are not tag compatible"
        )
        self.m_mod_p = m_mod_p
        self.c_mod_p = c_mod_p
        self.p = p


class MalformedTagError(ManyRootError, ValueError):
    pass


class IncompleteClassError(ManyRootError, ValueError):
    def __init__(self, missing, message=None):
        super().__init__(message or f"incomplete root class: {missing} root(s) missing")
        self.missing = missing


class GroupError(ManyRootError, ValueError):
    """Group setup or refresh refused (too many users, non-unit seed)."""


class ScenarioError(ManyRootError, ValueError):
    def __init__(self, step_index, message):
        where = "scenario" if step_index is None else f"step {step_index}"
        super().__init__(f"{where}: {message}")
        self.step_index = step_index
