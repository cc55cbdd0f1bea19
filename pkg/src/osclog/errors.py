"""Exception hierarchy.

``HypothesisError`` subclasses signal that an input violates the hypotheses of
the estimate being evaluated; the CLI maps them to exit code 2.  Everything
else deriving from ``OsclogError`` is an internal/numerical failure (exit 1).
"""


class OsclogError(Exception):
    pass


class HypothesisError(OsclogError, ValueError):
    pass


class NumericalError(OsclogError, RuntimeError):
    pass


class ZeroPolynomial(HypothesisError):
    pass


class ConstantPolynomial(HypothesisError):
    pass


class DuplicateNodes(HypothesisError):
    pass


class UnboundedSet(HypothesisError):
    pass


class InfiniteMeasure(HypothesisError):
    pass


class ZeroTopHalf(HypothesisError):
    def __init__(self, msg="all coefficients b_k with k > d/2 vanish; "
                 "re-run with the effective degree"):
        super().__init__(msg)


class ZeroTail(HypothesisError):
    pass


class DegenerateTopHalf(HypothesisError):
    pass


class ZeroLinearForm(HypothesisError):
    pass


class HypothesisViolated(HypothesisError):
    pass


class NotOdd(HypothesisError):
    pass


class DegenerateRays(HypothesisError):
    pass


class StationaryTail(NumericalError):
    pass


class NonconvergedPanel(NumericalError):
    def __init__(self, msg, panel=None):
        super().__init__(msg)
        self.panel = panel
