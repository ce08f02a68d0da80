"""Fourth-order central stencil for mixed partial derivatives."""
import math


def mixed_partial(fun, h):
    """``d^2 f / ds dt`` at the origin, fourth order: ``(16 S(h) - S(2h)) / (48 h^2)``.

    ``S(k) = f(k, k) - f(k, -k) - f(-k, k) + f(-k, -k)``.
    """

    def S(k):
        return math.fsum([fun(k, k), -fun(k, -k), -fun(-k, k), fun(-k, -k)])

    return (16 * S(h) - S(2 * h)) / (48 * h * h)
