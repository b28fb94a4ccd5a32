"""Exception hierarchy shared by every ptlab module."""

from typing import Optional


class PtLabError(Exception):
    """Base class for ptlab errors"""


class ConfigError(PtLabError):
    """Invalid job configuration (exit status 2)"""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        context = []
        if field:
            context.append(f"field '{field}'")
        if line is not None:
            context.append(f"line {line}")
        suffix = f" ({', '.join(context)})" if context else ""
        super().__init__(f"{message}{suffix}")


class NumericalError(PtLabError):
    """A computation could not produce a trustworthy number (exit status 3)"""


class PoleError(NumericalError):
    """Gamma function evaluated at (or within tolerance of) a pole -n"""

    def __init__(self, z: complex, n: int):
        self.z = z
        self.n = n
        super().__init__(f"Gamma pole at z={z!r} (n={n})")


class OutOfRange(NumericalError):
    pass


class NotPTSymmetric(PtLabError):
    pass


class UnsupportedPotential(PtLabError):
    pass


class NotNormalizable(NumericalError):
    pass


class IntegrationOverflow(NumericalError, OverflowError):
    pass


class ZeroMomentum(NumericalError):
    pass


class SpectralSingularity(NumericalError):
    """|M22| vanished: lasing / CPA threshold of the potential at this k"""

    def __init__(self, k: complex, m22_abs: float):
        self.k = k
        self.m22_abs = m22_abs
        super().__init__(f"Spectral singularity at k={k!r}: |M22|={m22_abs:.3e}")


class DegenerateDenominator(NumericalError):
    pass


class AsymmetricGrid(PtLabError):
    pass


class GridMismatch(PtLabError):
    pass


class IncompleteWavefunction(PtLabError):
    pass


class ZeroFunction(NumericalError):
    pass


class NotAsymptoticallyFlat(PtLabError):
    pass


class BranchError(NumericalError):
    pass


class NoConvergence(NumericalError):
    """An iterative solve stopped without a root; last_energy is where it stopped"""

    def __init__(self, reason: str, last_energy: Optional[complex] = None):
        self.reason = reason
        self.last_energy = last_energy
        super().__init__(reason)


class EmptySpectrum(NumericalError):
    pass
