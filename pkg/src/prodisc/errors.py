"""Exception hierarchy.

Every error raised by the library derives from :class:`ProdiscError`.  Errors
that arise from the mathematics (a vanishing denominator, a complex square
root, an inconsistent sweep) derive from :class:`MathError`; configuration
problems raise :class:`SchemaError`.  The CLI maps these two families onto
distinct exit codes.
"""

from __future__ import annotations


class ProdiscError(Exception):
    """Base class. ``site`` is the lattice index (n1, n2) where known."""

    def __init__(self, message: str, site: tuple[int, int] | None = None):
        self.site = site
        if site is not None:
            message = f"{message} at site {tuple(int(s) for s in site)}"
        super().__init__(message)


class MathError(ProdiscError):
    """A degeneracy or inconsistency in the numerics."""


class SchemaError(ProdiscError):
    """Invalid configuration; ``path`` is a JSON pointer such as ``/grid/n1``."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path or '/'}: {message}")


class DegenerateLine(MathError):
    """Two points are projectively equal."""


class GridTooSmall(MathError):
    """The grid has too few sites for the stencil."""


class ComplexBranch(MathError):
    """Negative radicand in the w equation."""


class SingularW(MathError):
    """|w| below the degeneracy guard."""


class RuledDegeneracy(MathError):
    """One of a, b, a_bar, b_bar vanished."""


class PathInconsistency(MathError):
    """Integration depends on the lattice path."""


class DegenerateQuadric(MathError):
    """Implicit quadric is not unique."""


class ZeroNu(MathError):
    """Label nu is zero where division by it is required."""


class RiccatiPole(MathError):
    """Riccati map hits its pole."""


class NotApplicable(MathError):
    """Operation does not apply to this lattice class."""


class DimensionMismatch(MathError):
    """Array shapes do not match the lattice."""


class DenominatorBlowup(MathError):
    """A rational formula has a vanishing denominator."""


class NegativeRadicand(MathError):
    """chi or chi_bar would be complex."""


class SignObstruction(MathError):
    """No consistent sign assignment exists."""


class ZeroKappa(MathError):
    """Gauge function kappa vanished."""


class AffineChartFailure(MathError):
    """Chart coordinate vanished."""


class NonConstantC(MathError):
    """Conserved vector is not constant."""


class ZeroTau(MathError):
    """tau or sigma vanished."""


class InconsistentRecurrences(MathError):
    """tau recurrences disagree."""


class NotTzitzeica(MathError):
    """Tzitzeica constraint is violated."""


class OverdeterminedInconsistency(MathError):
    """Unused equations of an overdetermined system fail."""


class ConstraintViolated(MathError):
    """Admissibility constant is nonzero."""


class ZeroEigenfunction(MathError):
    """Eigenfunction vanishes on the grid."""


class NoRootInBracket(MathError):
    """Root finder found no sign change."""


class NotConstant(MathError):
    """Quantity expected to be constant varies."""


class ZeroLambda(MathError):
    """Spectral or scaling parameter is zero."""


class EmptyMesh(MathError):
    """No vertices could be exported."""
