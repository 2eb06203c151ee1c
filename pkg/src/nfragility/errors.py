"""Exception types raised by the library."""

from __future__ import annotations


class DimensionError(ValueError):
    """Operand shapes are incompatible."""


class NotHermitianError(ValueError):
    """A matrix that must be Hermitian is not, within tolerance."""


class InvalidStateError(ValueError):
    """A matrix fails density-matrix validation."""


class MatrixDomainError(ValueError):
    """A scalar function is undefined on part of a spectrum."""


class ImaginaryResidueError(ArithmeticError):
    """A trace that must be real carries a significant imaginary part."""


class NearPureDivergenceError(ValueError):
    """The 1-fragility diverges because the state has a (near) zero eigenvalue."""

    def __init__(self, eigenvalue: float, floor: float):
        self.eigenvalue = float(eigenvalue)
        self.floor = float(floor)
        super().__init__(
            f"state eigenvalue {self.eigenvalue:.3e} is below the floor {self.floor:.1e}; "
            "the 1-fragility diverges for states with vanishing eigenvalues"
        )


class TruncationError(RuntimeError):
    """Fock-space truncation failed to converge."""

    def __init__(self, message: str, dims: list[int], deviations: list[float]):
        self.dims = list(dims)
        self.deviations = list(deviations)
        super().__init__(message)
