import logging
import math

from sgdlab.utils.errors import SgdLabError

logger = logging.getLogger(__name__)


class FlatnessError(SgdLabError, ValueError):
    pass


def agm_sequence(a, b, tol=1e-12, max_iter=100):
    """
    The arithmetic/geometric iterates (a_k, b_k), starting with (a, b), up to
    the first k with |a_k - b_k| < tol * a_k.
    """
    if not (a > 0 and b > 0 and tol > 0):
        msg = 'agm needs positive arguments and tolerance; got a={0}, b={1}, tol={2}'.format(a, b, tol)
        logger.error(msg)
        raise FlatnessError(msg)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise FlatnessError('agm needs finite arguments; got a={0}, b={1}'.format(a, b))
    a, b = float(max(a, b)), float(min(a, b))
    seq = [(a, b)]
    for _ in range(max_iter):
        if abs(a - b) < tol * a:
            return seq
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        seq.append((a, b))
    msg = 'agm iteration did not reach tol={0} in {1} steps'.format(tol, max_iter)
    logger.error(msg)
    raise FlatnessError(msg)


def agm(a, b, tol=1e-12):
    """Arithmetic-geometric mean of a and b."""
    a_k, b_k = agm_sequence(a, b, tol)[-1]
    return 0.5 * (a_k + b_k)


def agm_log_limit(eps):
    """|log eps| * agm(1, eps), which tends to pi/2 as eps -> 0."""
    if not 0 < eps < 1:
        msg = 'eps must lie in (0, 1); got {0}'.format(eps)
        logger.error(msg)
        raise FlatnessError(msg)
    return abs(math.log(eps)) * agm(1.0, eps)
