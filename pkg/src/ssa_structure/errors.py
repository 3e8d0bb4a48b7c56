"""Exception hierarchy shared by the decomposers and the CLI."""


class StructureError(Exception):
    """Base class for failures of the structure analyzers."""


class NotSaturatedError(StructureError):
    """The entropy inequality is not saturated at the requested tolerance."""

    def __init__(self, identity: str, gap_bits: float, tol: float):
        self.identity = identity
        self.gap_bits = float(gap_bits)
        self.tol = float(tol)
        super().__init__(f"{identity} gap {gap_bits:.3e} bits exceeds tolerance {tol:.1e}")


class StructureVerificationError(StructureError):
    """A candidate structure failed its verification gate."""

    def __init__(self, message: str, residual: float):
        self.residual = float(residual)
        super().__init__(f"{message} (residual {residual:.3e})")


class RefinementExhaustedError(StructureError):
    """Block refinement hit its depth bound with an impure left block."""

    def __init__(self, worst_eigenvalue: float, depth: int):
        self.worst_eigenvalue = float(worst_eigenvalue)
        self.depth = depth
        super().__init__(
            f"left blocks still mixed after {depth} refinement levels "
            f"(worst largest eigenvalue {worst_eigenvalue:.9f})"
        )
