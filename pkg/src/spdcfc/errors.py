"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input violates a documented precondition or invariant."""


class NoRealImageError(DomainError):
    """Thin-lens imaging with the object at or inside the focal length."""


class WavelengthRangeError(DomainError):
    """Wavelength outside the validity range of a refractive-index model."""


class ConvergenceError(RuntimeError):
    """Quadrature refinement did not reach the requested tolerance.

    Carries the last two refinement values so callers can report both.
    """

    def __init__(self, message: str, eta_coarse: float, eta_fine: float,
                 est_rel_err: float):
        super().__init__(message)
        self.eta_coarse = eta_coarse
        self.eta_fine = eta_fine
        self.est_rel_err = est_rel_err
