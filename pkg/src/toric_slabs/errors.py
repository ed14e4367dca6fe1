"""Exception hierarchy.

Every error carries a stable ``code`` string so that the CLI and JSON
reports can refer to failures without parsing messages.
"""

from __future__ import annotations


class ToricSlabError(Exception):
    """Base class for all errors raised by this package."""

    code = "INTERNAL"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code

    def to_dict(self) -> dict:
        return {"code": self.code, "message": str(self)}


class InvalidInput(ToricSlabError):
    """Malformed document or a decomposition that fails validation."""

    code = "MALFORMED_INPUT"


class UnsupportedInput(ToricSlabError):
    """Input is well formed but outside the supported regime."""

    code = "CONE_NOT_SMOOTH"


class NotAdjacent(ToricSlabError):
    code = "NOT_ADJACENT"


class OutsideTangentWedge(ToricSlabError):
    code = "OUTSIDE_TANGENT_WEDGE"


class OverrideNotConvex(ToricSlabError):
    code = "OVERRIDE_NOT_CONVEX"


class ConstantTermNotOne(ToricSlabError):
    code = "CONSTANT_TERM_NOT_ONE"


class TruncationOverflow(ToricSlabError):
    code = "TRUNCATION_OVERFLOW"


class RankZeroQ(UnsupportedInput):
    code = "RANK_ZERO_Q"


class VertexNotInterior(ToricSlabError):
    code = "VERTEX_NOT_INTERIOR"


class LeafCapExceeded(ToricSlabError):
    code = "LEAF_CAP_EXCEEDED"


class NonIntegralCoefficient(ToricSlabError):
    code = "NON_INTEGRAL_COEFFICIENT"
