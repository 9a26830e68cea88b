"""Exception taxonomy shared by every module."""


class MorreyOpsError(Exception):
    """Base class for package-specific failures."""


class InputError(MorreyOpsError, ValueError):
    """Malformed or inconsistent caller input (dimension mismatch, bad exponents)."""


class ConfigurationError(MorreyOpsError):
    """Group descriptor combination that the catalog does not support."""


class DivergenceError(MorreyOpsError):
    """A quadrature or series was detected to be non-convergent.

    ``what`` names the integral/sum/condition, ``detail`` says which end failed.
    """

    def __init__(self, what: str, detail: str = ""):
        self.what = what
        self.detail = detail
        msg = f"divergent: {what}" + (f" ({detail})" if detail else "")
        super().__init__(msg)


class PrecisionError(MorreyOpsError):
    """An estimator exhausted its budget before reaching the target tolerance."""

    def __init__(self, what: str, achieved: float, target: float):
        self.achieved = achieved
        self.target = target
        super().__init__(
            f"{what}: achieved error {achieved:.3e} exceeds target {target:.3e}"
        )


class HypothesisError(MorreyOpsError):
    """A profile condition required by an operator does not hold."""

    def __init__(self, condition: str, detail: str = ""):
        self.condition = condition
        msg = f"hypothesis failed: {condition}" + (f" ({detail})" if detail else "")
        super().__init__(msg)


class ConvergenceError(MorreyOpsError):
    """A limit extrapolation did not satisfy its Cauchy criterion."""


class ResourceError(MorreyOpsError):
    """A request would exceed the configured memory budget."""
