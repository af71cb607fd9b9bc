"""Exception types shared across the pipeline."""


class PipelineError(Exception):
    """Base class. ``stage`` names the pipeline step that raised."""

    stage = "core"


class OrderRangeError(PipelineError, ValueError):
    stage = "specfun"


class GammaPoleError(PipelineError, ValueError):
    stage = "specfun"


class IntegrationError(PipelineError, RuntimeError):
    stage = "scattering"

    def __init__(self, message, zeta=None):
        super().__init__(message)
        self.zeta = zeta


class ConsistencyError(PipelineError, RuntimeError):
    stage = "scattering"


class QuadratureError(PipelineError, RuntimeError):
    stage = "cauchy"

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class DomainError(PipelineError, ValueError):
    stage = "cauchy"


class SpectralConditionError(PipelineError, ValueError):
    stage = "model_rhp"

    def __init__(self, message, margin=None):
        super().__init__(message)
        self.margin = margin


class DegenerateInputError(PipelineError, ValueError):
    stage = "model_rhp"


class AsymptoticsError(PipelineError, ValueError):
    stage = "asymptotics"


class BoxTooSmallError(PipelineError, RuntimeError):
    stage = "pde"

    def __init__(self, message, boundary_amplitude=None):
        super().__init__(message)
        self.boundary_amplitude = boundary_amplitude


class InstabilityError(PipelineError, RuntimeError):
    stage = "pde"


class RayExitError(PipelineError, ValueError):
    stage = "pde"
