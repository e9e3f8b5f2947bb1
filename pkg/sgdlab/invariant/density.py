import logging
import math
import os
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import special

from sgdlab.utils.errors import SgdLabError
from sgdlab.utils.io_utils import write_csv, read_csv, write_json, read_json
from sgdlab.utils.sgdlab_enums import DensityModel, Geometry, DivergenceMode, IntegrabilityClass

logger = logging.getLogger(__name__)

_ON_MINIMIZERS_TOL = 1e-8


class DensityError(SgdLabError, ValueError):
    pass


class NormalizationError(DensityError):
    pass


def sphere_area(m):
    """Surface measure of the unit sphere S^{m-1} in R^m."""
    return 2 * math.pi ** (0.5 * m) / special.gamma(0.5 * m)


@dataclass(frozen=True)
class InvariantModel:
    """Candidate invariant density: f^alpha (power) or exp(-f/eta) (boltzmann)."""
    model: DensityModel
    alpha: Optional[float] = None
    eta: Optional[float] = None

    def __post_init__(self):
        model = DensityModel(self.model)
        object.__setattr__(self, 'model', model)
        if model == DensityModel.power:
            if self.alpha is None or not math.isfinite(self.alpha):
                raise DensityError('power model needs a finite alpha; got {0}'.format(self.alpha))
        elif self.eta is None or not self.eta > 0:
            raise DensityError('boltzmann model needs eta > 0; got {0}'.format(self.eta))

    @classmethod
    def power(cls, alpha):
        return cls(DensityModel.power, alpha=float(alpha))

    @classmethod
    def boltzmann(cls, eta):
        return cls(DensityModel.boltzmann, eta=float(eta))

    def log_evaluate(self, f):
        f = np.asarray(f, dtype=float)
        if self.model == DensityModel.boltzmann:
            return -f / self.eta
        with np.errstate(divide='ignore', invalid='ignore'):
            return self.alpha * np.log(f)

    def evaluate(self, f):
        f = np.asarray(f, dtype=float)
        if self.model == DensityModel.boltzmann:
            return np.exp(-f / self.eta)
        with np.errstate(divide='ignore'):
            return f ** self.alpha

    def describe(self):
        if self.model == DensityModel.power:
            return {'model': 'power', 'alpha': self.alpha}
        return {'model': 'boltzmann', 'eta': self.eta}


@dataclass(frozen=True)
class DensityGrid:
    """
    A nonnegative density on a 1D grid of cells.

    ``line`` cells are intervals of the real line; ``radial`` cells are
    spherical shells in R^dim, so their volumes carry the sphere area and
    the r^(dim-1) factor. ``integrand`` (coordinate -> density value) is kept
    so that :func:`normalize` can integrate beyond the grid.
    """
    geometry: Geometry
    edges: np.ndarray
    values: np.ndarray
    dim: int = 1
    normalized: bool = False
    metadata: dict = field(default_factory=dict)
    integrand: Optional[Callable] = field(default=None, repr=False, compare=False)
    domain: Optional[Tuple[float, float]] = None
    center: float = 0.0

    def __post_init__(self):
        geometry = Geometry(self.geometry)
        object.__setattr__(self, 'geometry', geometry)
        edges = np.asarray(self.edges, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if geometry not in (Geometry.line, Geometry.radial):
            raise DensityError('a density grid is a line or radial grid; got {0}'.format(geometry.name))
        if edges.ndim != 1 or len(edges) < 2 or np.any(np.diff(edges) <= 0):
            raise DensityError('density grid edges must be strictly increasing')
        if geometry == Geometry.radial and edges[0] < 0:
            raise DensityError('radial edges must be nonnegative')
        if values.shape != (len(edges) - 1,):
            raise DensityError('expected {0} cell values; got shape {1}'.format(len(edges) - 1, values.shape))
        if np.any(~np.isfinite(values)) or np.any(values < 0):
            raise DensityError('density values must be finite and nonnegative')
        object.__setattr__(self, 'edges', edges)
        object.__setattr__(self, 'values', values)
        if self.domain is None:
            object.__setattr__(self, 'domain', (0.0, math.inf) if geometry == Geometry.radial
                               else (-math.inf, math.inf))
        if self.normalized and abs(self.mass() - 1) > 1e-9:
            raise DensityError('grid flagged normalized but has mass {0:.12g}'.format(self.mass()))

    @property
    def centers(self):
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def volumes(self):
        if self.geometry == Geometry.line:
            return np.diff(self.edges)
        m = self.dim
        return sphere_area(m) * (self.edges[1:] ** m - self.edges[:-1] ** m) / m

    def masses(self):
        return self.values * self.volumes

    def mass(self):
        return float(np.sum(self.masses()))

    def cdf_nodes(self):
        """Edges and the CDF at the edges, linear in between."""
        cum = np.concatenate([[0.0], np.cumsum(self.masses())])
        total = cum[-1]
        if total <= 0:
            raise DensityError('density has no mass on its grid')
        return self.edges, cum / total

    def scaled(self, constant):
        return replace(self, values=self.values * constant, normalized=False)

    def normalize_cells(self):
        total = self.mass()
        if not total > 0 or not math.isfinite(total):
            raise NormalizationError('cannot normalize a grid with mass {0}'.format(total))
        return replace(self, values=self.values / total, normalized=True)

    def rows(self):
        return list(zip(self.centers, self.volumes, self.values))


def grid_edges(low, high, cells, graded=None):
    """
    Cell edges on [low, high]. ``graded`` > 1 clusters cells toward ``low``
    geometrically (ratio of the last to the first cell width).
    """
    if not high > low or cells < 1:
        raise DensityError('need low < high and cells >= 1')
    if graded is None or graded == 1:
        return np.linspace(low, high, cells + 1)
    q = graded ** (1.0 / max(cells - 1, 1))
    widths = q ** np.arange(cells)
    return low + (high - low) * np.concatenate([[0.0], np.cumsum(widths)]) / widths.sum()


def density_eval(landscape, model, geometry, edges, center=0.0):
    """
    Evaluate an (unnormalized) invariant density at the cell centers.

    Parameters
    ----------
    landscape: Landscape
        one-dimensional for ``line`` geometry, radially symmetric for ``radial``
    model: InvariantModel
    geometry: Geometry
    edges: array_like
        strictly increasing cell edges (radii for radial grids)

    Returns
    -------
    DensityGrid
    """
    geometry = Geometry(geometry)
    edges = np.asarray(edges, dtype=float)
    centers = 0.5 * (edges[:-1] + edges[1:])
    f, _ = landscape.profile(centers, geometry)
    if model.model == DensityModel.power and model.alpha < 0:
        bad = ~(f > 0)
        minimizers = landscape.minimizer_set
        if landscape.overparametrized and minimizers is not None:
            # centers on N up to roundoff
            points = np.zeros((len(centers), landscape.dim))
            points[:, 0] = centers
            bad |= minimizers.distance(points) <= _ON_MINIMIZERS_TOL
        bad = np.flatnonzero(bad)
        if len(bad):
            msg = 'f = {0:.3g} vanishes in cell {1} (center {2:.6g}) with alpha = {3} < 0'.format(
                float(f[bad[0]]), int(bad[0]), float(centers[bad[0]]), model.alpha)
            logger.error(msg)
            raise DensityError(msg)

    def integrand(x):
        return model.evaluate(landscape.profile(x, geometry)[0])

    meta = {'landscape': landscape.name, 'params': landscape.params}
    meta.update(model.describe())
    return DensityGrid(geometry=geometry, edges=edges, values=model.evaluate(f),
                       dim=landscape.dim if geometry == Geometry.radial else 1,
                       metadata=meta, integrand=integrand, center=center)


def write_density(grid, path):
    """CSV ``coord,volume,value`` plus a JSON sidecar next to it."""
    write_csv(path, ['coord', 'volume', 'value'], grid.rows())
    sidecar = os.path.splitext(path)[0] + '.json'
    meta = dict(grid.metadata)
    meta.update({'normalized': grid.normalized, 'geometry': grid.geometry.name, 'dim': grid.dim,
                 'edges': grid.edges.tolist()})
    write_json(sidecar, meta)
    return [path, sidecar]


def read_density(path):
    _, rows = read_csv(path)
    meta = read_json(os.path.splitext(path)[0] + '.json')
    values = np.array([r[2] for r in rows])
    return DensityGrid(geometry=Geometry[meta['geometry']], edges=np.array(meta['edges']), values=values,
                       dim=meta['dim'], normalized=meta['normalized'], metadata=meta)


# Expanding-ball quadrature

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)
_RATIO_TOL = 1e-6


@dataclass(frozen=True)
class Refinement:
    resolution: int
    radius: float


def default_refinement(levels=12, resolution=6, radius=2.0):
    """Doubling outer radii and growing resolution."""
    return [Refinement(resolution + j, radius * 2.0 ** j) for j in range(levels)]


def _as_refinement(seq):
    if seq is None:
        seq = default_refinement()
    seq = [s if isinstance(s, Refinement) else Refinement(int(s[0]), float(s[1])) for s in seq]
    if len(seq) < 3:
        raise NormalizationError('the expanding-ball test needs at least three refinement levels')
    res = [s.resolution for s in seq]
    rad = [s.radius for s in seq]
    if any(b <= a for a, b in zip(res, res[1:])) or any(b <= a for a, b in zip(rad, rad[1:])):
        msg = 'contradictory refinement: resolutions {0} and radii {1} must both increase'.format(res, rad)
        logger.error(msg)
        raise NormalizationError(msg)
    if rad[0] <= 1:
        raise NormalizationError('outer radii must exceed the pivot radius 1; got {0}'.format(rad[0]))
    ratios = np.array(rad[1:]) / np.array(rad[:-1])
    if np.max(ratios) - np.min(ratios) > 1e-9 * np.max(ratios):
        msg = 'outer radii must grow geometrically for the ratio test; got ratios {0}'.format(ratios.tolist())
        logger.error(msg)
        raise NormalizationError(msg)
    return seq


def _log_quad(fn, a, b, resolution):
    """∫_a^b fn(r) dr with composite Gauss-Legendre in log r."""
    if not b > a:
        return 0.0
    ua, ub = math.log(a), math.log(b)
    panels = max(1, int(math.ceil(resolution * (ub - ua))))
    cuts = np.linspace(ua, ub, panels + 1)
    mid = 0.5 * (cuts[:-1] + cuts[1:])
    half = 0.5 * (cuts[1:] - cuts[:-1])
    u = (mid[:, None] + half[:, None] * _GL_NODES).ravel()
    w = (half[:, None] * _GL_WEIGHTS).ravel()
    r = np.exp(u)
    with np.errstate(over='ignore', invalid='ignore'):
        vals = fn(r) * r
    vals = np.where(np.isnan(vals), np.inf, vals)
    return float(np.sum(w * vals))


@dataclass(frozen=True)
class DirectionVerdict:
    increments: Tuple[float, ...]
    ratio: float
    convergent: bool
    tail: float


def _verdict(increments):
    d = np.array(increments, dtype=float)
    last, prev = d[-1], d[-2]
    if not np.all(np.isfinite(d)):
        return DirectionVerdict(tuple(d), math.inf, False, math.inf)
    if last == 0:
        return DirectionVerdict(tuple(d), 0.0, True, 0.0)
    if prev == 0:
        return DirectionVerdict(tuple(d), math.inf, False, math.inf)
    q = last / prev
    if q >= 1 - _RATIO_TOL:
        return DirectionVerdict(tuple(d), q, False, math.inf)
    return DirectionVerdict(tuple(d), q, True, last * q / (1 - q))


@dataclass(frozen=True)
class NormalizationResult:
    """
    Outcome of the expanding-ball integration.

    ``integrable`` follows from ratio tests on successive shell increments
    toward the singular set and toward infinity; ``integral`` adds the
    geometric tail extrapolation; ``converged`` additionally requires the
    core integral to be stable under refinement and the tail correction to
    be resolved to quad_tol.
    """
    integral: float
    integrable: bool
    converged: bool
    divergence_mode: DivergenceMode
    partial_integrals: Tuple[float, ...]
    inner: Optional[DirectionVerdict] = None
    outer: Optional[DirectionVerdict] = None
    density: Optional[DensityGrid] = None
    factors: Tuple['NormalizationResult', ...] = ()

    @property
    def constant(self):
        if not self.integrable or not self.integral > 0:
            return None
        return 1.0 / self.integral

    @property
    def classification(self):
        if self.divergence_mode in (DivergenceMode.at_minimizers, DivergenceMode.both):
            return IntegrabilityClass.not_locally_integrable
        if self.divergence_mode == DivergenceMode.at_infinity:
            return IntegrabilityClass.locally_not_globally
        return IntegrabilityClass.integrable


def _mode(inner_ok, outer_ok):
    if inner_ok and outer_ok:
        return DivergenceMode.none
    if inner_ok:
        return DivergenceMode.at_infinity
    if outer_ok:
        return DivergenceMode.at_minimizers
    return DivergenceMode.both


def expanding_integral(inner_fn, outer_fn, refinement=None, quad_tol=1e-8):
    """
    ∫_0^∞ of a radial integrand (Jacobian included) split at the pivot r = 1.

    ``inner_fn`` is integrated over [1/R_j, 1] and ``outer_fn`` over
    [1, R_j] for the outer radii R_j of the refinement; each new shell is
    integrated at the new resolution, so the partial integrals are
    nondecreasing.
    """
    seq = _as_refinement(refinement)
    core_inner = _log_quad(inner_fn, 1.0 / seq[0].radius, 1.0, seq[0].resolution)
    core_outer = _log_quad(outer_fn, 1.0, seq[0].radius, seq[0].resolution)
    partial = [core_inner + core_outer]
    inner_inc = []
    outer_inc = []
    for prev, cur in zip(seq, seq[1:]):
        inner_inc.append(_log_quad(inner_fn, 1.0 / cur.radius, 1.0 / prev.radius, cur.resolution))
        outer_inc.append(_log_quad(outer_fn, prev.radius, cur.radius, cur.resolution))
        partial.append(partial[-1] + inner_inc[-1] + outer_inc[-1])

    inner = _verdict(inner_inc)
    outer = _verdict(outer_inc)
    integrable = inner.convergent and outer.convergent
    mode = _mode(inner.convergent, outer.convergent)
    if not integrable:
        logger.info('expanding-ball integral diverges ({0}); increment ratios inner={1:.4g} outer={2:.4g}'.format(
            mode.name, inner.ratio, outer.ratio))
        return NormalizationResult(integral=math.inf, integrable=False, converged=False, divergence_mode=mode,
                                   partial_integrals=tuple(partial), inner=inner, outer=outer)

    integral = partial[-1] + inner.tail + outer.tail
    fine = seq[-1].resolution
    core_fine = (_log_quad(inner_fn, 1.0 / seq[0].radius, 1.0, fine)
                 + _log_quad(outer_fn, 1.0, seq[0].radius, fine))
    cauchy = abs(core_fine - partial[0]) <= quad_tol * max(abs(integral), 1e-300)
    tail_rel = (inner.increments[-1] * inner.ratio ** 2 + outer.increments[-1] * outer.ratio ** 2) / integral
    converged = bool(cauchy and tail_rel <= quad_tol) or bool(cauchy and _geometric(inner) and _geometric(outer))
    return NormalizationResult(integral=integral, integrable=True, converged=converged, divergence_mode=mode,
                               partial_integrals=tuple(partial), inner=inner, outer=outer)


def _geometric(verdict, tol=1e-6):
    d = np.array(verdict.increments)
    if len(d) < 3 or d[-1] == 0:
        return True
    if d[-3] == 0 or d[-2] == 0:
        return False
    return abs(d[-1] / d[-2] - d[-2] / d[-3]) <= tol


def _line_pieces(fn, center, domain):
    """Fold a line integrand about ``center``: r -> g(center + r) + g(center - r) on the domain."""
    lo, hi = domain

    def side(x):
        inside = (x >= lo) & (x <= hi)
        return np.where(inside, fn(np.clip(x, lo, hi)), 0.0)

    def both(r):
        return side(center + r) + side(center - r)
    return both


def normalize(density, refinement_sequence=None, quad_tol=1e-8):
    """
    Normalize a density by integrating its integrand over expanding balls
    around the grid center (pivot radius 1).

    Parameters
    ----------
    density: DensityGrid
        from :func:`density_eval` (or any grid carrying an integrand)
    refinement_sequence: list of (resolution, outer radius)
        both strictly increasing; radii geometric and > 1
    quad_tol: float

    Returns
    -------
    NormalizationResult
        ``density`` holds the grid scaled by the normalization constant when
        the density is integrable
    """
    if density.integrand is None:
        raise NormalizationError('density grid carries no integrand to normalize')
    if density.geometry == Geometry.radial:
        area = sphere_area(density.dim)
        m = density.dim

        def fn(r):
            return area * density.integrand(r) * r ** (m - 1)
    else:
        fn = _line_pieces(density.integrand, density.center, density.domain)
    res = expanding_integral(fn, fn, refinement_sequence, quad_tol)
    if res.integrable:
        res = replace(res, density=density.scaled(1.0 / res.integral))
        logger.debug('normalized {0}: integral {1:.12g}, converged {2}'.format(
            density.metadata.get('landscape'), res.integral, res.converged))
    return res


def normalize_product(landscape, model, refinement_sequence=None, quad_tol=1e-8):
    """
    Normalize f^alpha for a product landscape f = prod_i g_i as the product
    of the factor integrals of g_i^alpha.
    """
    factors = landscape.factors()
    if factors is None:
        raise NormalizationError('{0} does not factorize'.format(landscape.name))
    if model.model != DensityModel.power:
        raise NormalizationError('only power densities factorize over a product landscape')
    results = []
    for factor in factors:
        if factor.geometry == Geometry.radial:
            area = sphere_area(factor.dim)

            def fn(r, factor=factor, area=area):
                return area * model.evaluate(factor.values(r)) * r ** (factor.dim - 1)
        else:
            def g(x, factor=factor):
                return model.evaluate(factor.values(x))
            fn = _line_pieces(g, 0.0, (-math.inf, math.inf))
        results.append(expanding_integral(fn, fn, refinement_sequence, quad_tol))

    inner_ok = all(r.divergence_mode not in (DivergenceMode.at_minimizers, DivergenceMode.both) for r in results)
    outer_ok = all(r.divergence_mode not in (DivergenceMode.at_infinity, DivergenceMode.both) for r in results)
    integrable = inner_ok and outer_ok
    integral = float(np.prod([r.integral for r in results])) if integrable else math.inf
    partial = tuple(np.prod([r.partial_integrals for r in results], axis=0))
    return NormalizationResult(integral=integral, integrable=integrable,
                               converged=integrable and all(r.converged for r in results),
                               divergence_mode=_mode(inner_ok, outer_ok), partial_integrals=partial,
                               factors=tuple(results))


def lattice_verdict(alpha, m, n, gamma, refinement_sequence=None):
    """
    Expanding-ball verdict for f^alpha near an n-dimensional minimizer set
    in R^m with growth exponent gamma, using the radial model
    f = r^2 (1 + r^2)^((gamma - 2)/2): the normal measure r^(m-n-1) dr
    near the set and the full measure r^(m-1) dr at infinity.
    """
    def f(r):
        return r * r * (1 + r * r) ** (0.5 * (gamma - 2))

    def inner(r):
        return f(r) ** alpha * r ** (m - n - 1)

    def outer(r):
        return f(r) ** alpha * r ** (m - 1)

    return expanding_integral(inner, outer, refinement_sequence).classification
