"""Oscillatory λ-quadrature over R^k.

Every kernel in the package is a prefactor times

    I = ∫_{R^k} cos(<λ, ω>) · envelope(λ) dλ,

with an even envelope. The engine integrates over the half space λ_1 ≥ 0 and
doubles. The default rule is a tensor product of composite Gauss-Legendre
rules on the box [0, R] × [-R, R]^{k-1}:

* R is chosen so that the envelope's tail bound beyond the ball of radius R
  stays below a tenth of the tolerance;
* every panel gets the base node count plus an oscillation allowance, and
  panels far from the origin lose base nodes in proportion to the logarithm
  of the envelope bound there;
* the error estimate is the difference between the rule and the same rule
  with four fewer base nodes per panel, refined until it meets the tolerance.

Node sets and the envelope's time-independent data are cached per instance.
"""

import heapq
import math
from collections import OrderedDict
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import gamma

from step2heat.config import QuadratureConfig
from step2heat.errors import ConvergenceError, SmallTimeError, TruncationError
from step2heat.logging import get_logger
from step2heat.models import LambdaQuery, QuadratureResult
from step2heat.protocols import Envelope, NodeData

logger = get_logger(__name__)

FloatArray = npt.NDArray[np.float64]

OSCILLATION_FACTOR = 0.7
MIN_PANEL_NODES = 4
COARSE_DROP = 4
CHUNK_ELEMENTS = 1 << 22
IMAG_TOLERANCE = 1e-8
ADAPTIVE_ORDERS = (5, 8)


def gauss_legendre(nodes: int) -> tuple[FloatArray, FloatArray]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    x, w = leggauss(nodes)
    return np.asarray(x, dtype=np.float64), np.asarray(w, dtype=np.float64)


def composite_rule(edges: npt.ArrayLike, counts: Sequence[int]) -> tuple[FloatArray, FloatArray]:
    """Composite Gauss-Legendre rule with ``counts[i]`` nodes on panel i.

    Args:
        edges: Increasing panel edges, length len(counts) + 1
        counts: Nodes per panel

    Returns:
        Nodes and weights, concatenated panel by panel
    """
    edge_array = np.asarray(edges, dtype=np.float64)
    if edge_array.size != len(counts) + 1:
        raise ValueError(
            f"{len(counts)} panels need {len(counts) + 1} edges, got {edge_array.size}"
        )
    nodes: list[FloatArray] = []
    weights: list[FloatArray] = []
    for left, right, count in zip(edge_array[:-1], edge_array[1:], counts, strict=True):
        x, w = gauss_legendre(int(count))
        half = 0.5 * (right - left)
        nodes.append(left + half * (x + 1.0))
        weights.append(half * w)
    return np.concatenate(nodes), np.concatenate(weights)


def uniform_rule(a: float, b: float, panels: int, nodes: int) -> tuple[FloatArray, FloatArray]:
    """Composite Gauss-Legendre rule with equal panels on [a, b]."""
    return composite_rule(np.linspace(a, b, panels + 1), [nodes] * panels)


def tensor_rule(
    rules: Sequence[tuple[FloatArray, FloatArray]],
) -> tuple[FloatArray, FloatArray]:
    """Tensor product of one-dimensional rules: nodes (N, d) and weights (N,)."""
    grids = np.meshgrid(*[rule[0] for rule in rules], indexing="ij")
    weight_grids = np.meshgrid(*[rule[1] for rule in rules], indexing="ij")
    nodes = np.stack([grid.ravel() for grid in grids], axis=1)
    weights = np.prod(np.stack([grid.ravel() for grid in weight_grids], axis=1), axis=1)
    return nodes, weights


def sphere_area(k: int) -> float:
    """Surface measure of the unit sphere in R^k (2 for k = 1)."""
    return float(2.0 * math.pi ** (k / 2.0) / gamma(k / 2.0))


@dataclass(frozen=True, eq=False)
class NodeSet:
    """Tensor rule on the half box with the envelope's node data."""

    nodes: FloatArray
    weights: FloatArray
    data: NodeData
    diagonal: float

    @property
    def size(self) -> int:
        return int(self.weights.size)


class OscillatoryQuadrature:
    """Evaluation context for λ-integrals against one envelope.

    Instances cache node sets and are meant to be owned by a single thread.
    """

    def __init__(self, envelope: Envelope, cfg: QuadratureConfig | None = None) -> None:
        self.envelope = envelope
        self.cfg = cfg or QuadratureConfig()
        self.k = envelope.k
        self.width = self.cfg.resolved_panel_width(self.k)
        self.method = self.cfg.resolved_method(self.k)
        self.diagonal_mass = envelope.diagonal_mass()
        self.target = 0.1 * self.cfg.rel_tol * self.diagonal_mass
        self.radius = self._choose_radius()
        self.panels = int(round(self.radius / self.width))
        self._cache: OrderedDict[tuple[str, int, int], NodeSet] = OrderedDict()
        if self.method == "adaptive-subdivision" and self.k >= 4:
            logger.warning(
                "Adaptive subdivision over R^%d: cost grows exponentially with k", self.k
            )
        logger.debug(
            "λ-quadrature: k=%d R=%.3f panel width=%.4f method=%s target=%.3g",
            self.k,
            self.radius,
            self.width,
            self.method,
            self.target,
        )

    # Truncation

    def tail(self, radius: float) -> float:
        """Bound on ∫_{|λ|>radius} envelope(λ) dλ from the radial envelope bound."""
        value, _ = quad(
            lambda r: r ** (self.k - 1) * self.envelope.bound(r),
            radius,
            np.inf,
            epsabs=0.0,
            epsrel=1e-6,
            limit=200,
        )
        return sphere_area(self.k) * float(value)

    def _choose_radius(self) -> float:
        explicit = self.cfg.truncation_radius
        if explicit is not None:
            tail = self.tail(explicit)
            if tail > self.cfg.rel_tol * self.diagonal_mass:
                raise TruncationError(
                    f"truncation radius {explicit} leaves a tail bound {tail:.3g} above "
                    f"rel_tol·diagonal = {self.cfg.rel_tol * self.diagonal_mass:.3g}"
                )
            return self._snap(explicit)

        high = 1.0
        while self.tail(high) > self.target:
            high *= 2.0
            if high > 1e5:
                raise ConvergenceError("no truncation radius below 1e5 meets the tolerance")
        if high == 1.0:
            return self._snap(high)
        radius = brentq(
            lambda r: math.log(max(self.tail(r), 1e-300)) - math.log(self.target),
            0.5 * high,
            high,
            xtol=1e-3,
        )
        return self._snap(float(radius))

    def _snap(self, radius: float) -> float:
        return self.width * max(1, math.ceil(radius / self.width - 1e-9))

    # Node counts

    def oscillation_nodes(self, query: LambdaQuery) -> int:
        """Extra nodes per panel for the frequency and Gaussian width of a query."""
        omega = float(np.max(np.abs(query.omega), initial=0.0))
        extra = OSCILLATION_FACTOR * self.width * (omega + math.sqrt(query.gauss_scale))
        return 4 * math.ceil(extra / 4.0)

    def time_threshold(self, frequency_scale: float, gauss_scale: float) -> float:
        """Smallest t whose rule fits ``max_nodes_per_panel``.

        Args:
            frequency_scale: W with |ω|_∞ = W/t
            gauss_scale: C with Gaussian exponent c = C/t
        """
        budget = (self.cfg.max_nodes_per_panel - self.cfg.nodes_per_dim) / (
            OSCILLATION_FACTOR * self.width
        )
        root_c = math.sqrt(max(gauss_scale, 0.0))
        if frequency_scale <= 0.0 and root_c <= 0.0:
            return 0.0
        if frequency_scale <= 0.0:
            inverse_root_t = budget / root_c
        else:
            inverse_root_t = (
                -root_c + math.sqrt(gauss_scale + 4.0 * frequency_scale * budget)
            ) / (2.0 * frequency_scale)
        return 1.0 / inverse_root_t**2

    def _graded_counts(self, edges: FloatArray, base: int, extra: int) -> list[int]:
        relative_target = 0.1 * self.cfg.rel_tol
        span = math.log(1.0 / relative_target)
        counts = []
        for left, right in zip(edges[:-1], edges[1:], strict=True):
            inner = 0.0 if left < 0.0 < right else min(abs(left), abs(right))
            bound = max(self.envelope.bound(inner), 1e-300)
            ratio = min(max(math.log(bound / relative_target) / span, 0.0), 1.0)
            counts.append(extra + max(MIN_PANEL_NODES, math.ceil(base * ratio)))
        return counts

    def _node_set(self, kind: str, base: int, extra: int, mirrored: bool = False) -> NodeSet:
        key = (kind + ("-mirror" if mirrored else ""), base, extra)
        cached = self._cache.get(key)
        if cached is not None:
            self._cache.move_to_end(key)
            return cached

        half_edges = np.linspace(0.0, self.radius, self.panels + 1)
        full_edges = np.linspace(-self.radius, self.radius, 2 * self.panels + 1)
        half_counts = self._graded_counts(half_edges, base, extra)
        full_counts = self._graded_counts(full_edges, base, extra)
        if kind == "coarse":
            half_counts = [max(MIN_PANEL_NODES, c - COARSE_DROP) for c in half_counts]
            full_counts = [max(MIN_PANEL_NODES, c - COARSE_DROP) for c in full_counts]

        rules = [composite_rule(half_edges, half_counts)]
        rules += [composite_rule(full_edges, full_counts)] * (self.k - 1)
        total = math.prod(rule[0].size for rule in rules)
        if total > self.cfg.max_total_nodes:
            raise ConvergenceError(
                f"tensor rule needs {total} nodes, above max_total_nodes="
                f"{self.cfg.max_total_nodes}"
            )
        nodes, weights = tensor_rule(rules)
        if mirrored:
            nodes = -nodes
        data = self.envelope.prepare(nodes)
        diagonal = 2.0 * float(np.sum(weights * np.exp(data["log_base"])))
        node_set = NodeSet(nodes=nodes, weights=weights, data=data, diagonal=diagonal)

        self._cache[key] = node_set
        while len(self._cache) > self.cfg.cache_size:
            self._cache.popitem(last=False)
        logger.debug("Built %s node set: base=%d extra=%d nodes=%d", key[0], base, extra, total)
        return node_set

    # Integration

    def _sums(
        self, node_set: NodeSet, queries: Sequence[LambdaQuery], odd: bool = False
    ) -> FloatArray:
        """Σ w·envelope·cos(<λ,ω>) (sin for ``odd``) for each query."""
        rows = max(1, CHUNK_ELEMENTS // max(node_set.size, 1))
        results = np.empty(len(queries))
        for start in range(0, len(queries), rows):
            chunk = queries[start : start + rows]
            log_env = self.envelope.log_values(node_set.data, chunk)
            omegas = np.stack([query.omega for query in chunk])
            phases = omegas @ node_set.nodes.T
            wave = np.sin(phases) if odd else np.cos(phases)
            results[start : start + len(chunk)] = (np.exp(log_env) * wave) @ node_set.weights
        return results

    def _imag_residues(self, base: int, extra: int, queries: Sequence[LambdaQuery]) -> FloatArray:
        coarse = self._node_set("coarse", base, extra)
        mirror = self._node_set("coarse", base, extra, mirrored=True)
        # the mirrored set carries sin(-<λ,ω>), so the two halves add
        return np.abs(self._sums(coarse, queries, odd=True) + self._sums(mirror, queries, odd=True))

    def _tensor_group(
        self, queries: Sequence[LambdaQuery], extra: int
    ) -> list[QuadratureResult]:
        results: list[QuadratureResult | None] = [None] * len(queries)
        pending = list(range(len(queries)))
        base = self.cfg.nodes_per_dim
        for attempt in range(self.cfg.max_refinements + 1):
            if base + extra > self.cfg.max_nodes_per_panel:
                break
            batch = [queries[i] for i in pending]
            fine_set = self._node_set("fine", base, extra)
            coarse_set = self._node_set("coarse", base, extra)
            fine = 2.0 * self._sums(fine_set, batch)
            coarse = 2.0 * self._sums(coarse_set, batch)
            imag = (
                self._imag_residues(base, extra, batch)
                if self.cfg.check_imag
                else np.zeros(len(batch))
            )
            still_pending = []
            for position, index in enumerate(pending):
                value = float(fine[position])
                error = abs(value - float(coarse[position]))
                scale = max(abs(value), fine_set.diagonal)
                if imag[position] > IMAG_TOLERANCE * scale:
                    raise ConvergenceError(
                        f"imaginary residue {imag[position]:.3g} exceeds "
                        f"{IMAG_TOLERANCE:g}·{scale:.3g}"
                    )
                if error <= self.cfg.rel_tol * scale:
                    results[index] = QuadratureResult(
                        value=value,
                        est_error=error,
                        imag_residue=float(imag[position]),
                        diagonal=fine_set.diagonal,
                    )
                else:
                    still_pending.append(index)
            pending = still_pending
            if not pending:
                return [result for result in results if result is not None]
            logger.debug(
                "Refining %d λ-integrals after attempt %d (base %d)", len(pending), attempt, base
            )
            base += 4
        raise ConvergenceError(
            f"{len(pending)} λ-integrals missed rel_tol={self.cfg.rel_tol:g} after "
            f"{self.cfg.max_refinements} refinements"
        )

    def integrate(self, queries: Sequence[LambdaQuery]) -> list[QuadratureResult]:
        """Integrate a batch of queries, sharing node sets between similar ones.

        Raises:
            SmallTimeError: If a query needs more nodes per panel than allowed
            ConvergenceError: If the tolerance is not met within the refinements
        """
        if self.method == "adaptive-subdivision":
            return [self._adaptive(query) for query in queries]

        groups: dict[int, list[int]] = {}
        for index, query in enumerate(queries):
            extra = self.oscillation_nodes(query)
            if self.cfg.nodes_per_dim + extra > self.cfg.max_nodes_per_panel:
                raise SmallTimeError(query.t, self._query_threshold(query))
            groups.setdefault(extra, []).append(index)

        results: list[QuadratureResult | None] = [None] * len(queries)
        for extra, indices in groups.items():
            group_results = self._tensor_group([queries[i] for i in indices], extra)
            for index, result in zip(indices, group_results, strict=True):
                results[index] = result
        return [result for result in results if result is not None]

    def integrate_one(self, query: LambdaQuery) -> QuadratureResult:
        """Integrate a single query."""
        return self.integrate([query])[0]

    def _query_threshold(self, query: LambdaQuery) -> float:
        omega = float(np.max(np.abs(query.omega), initial=0.0))
        return self.time_threshold(omega * query.t, query.gauss_scale * query.t)

    # Adaptive subdivision

    def _box_sums(
        self, lower: FloatArray, upper: FloatArray, order: int, query: LambdaQuery
    ) -> tuple[float, float]:
        x, w = gauss_legendre(order)
        half = 0.5 * (upper - lower)
        rules = [(lower[d] + half[d] * (x + 1.0), half[d] * w) for d in range(self.k)]
        nodes, weights = tensor_rule(rules)
        data = self.envelope.prepare(nodes)
        envelope = np.exp(self.envelope.log_values(data, [query])[0])
        value = float(np.sum(weights * envelope * np.cos(nodes @ query.omega)))
        diagonal = float(np.sum(weights * np.exp(data["log_base"])))
        return value, diagonal

    def _adaptive(self, query: LambdaQuery) -> QuadratureResult:
        low_order, high_order = ADAPTIVE_ORDERS
        edges_half = np.linspace(0.0, self.radius, self.panels + 1)
        edges_full = np.linspace(-self.radius, self.radius, 2 * self.panels + 1)
        axes = [edges_half] + [edges_full] * (self.k - 1)
        heap: list[tuple[float, int, FloatArray, FloatArray, float, float]] = []
        counter = 0
        total_value = 0.0
        total_error = 0.0
        diagonal = 0.0

        def push(lower: FloatArray, upper: FloatArray) -> None:
            nonlocal counter, total_value, total_error, diagonal
            coarse, _ = self._box_sums(lower, upper, low_order, query)
            fine, box_diagonal = self._box_sums(lower, upper, high_order, query)
            error = abs(fine - coarse)
            heapq.heappush(heap, (-error, counter, lower, upper, fine, box_diagonal))
            counter += 1
            total_value += fine
            total_error += error
            diagonal += box_diagonal

        for corner in np.ndindex(*[axis.size - 1 for axis in axes]):
            lower = np.array([axes[d][corner[d]] for d in range(self.k)])
            upper = np.array([axes[d][corner[d] + 1] for d in range(self.k)])
            push(lower, upper)

        while 2.0 * total_error > self.cfg.rel_tol * max(2.0 * abs(total_value), 2.0 * diagonal):
            if len(heap) >= self.cfg.max_boxes:
                raise ConvergenceError(
                    f"adaptive subdivision used {len(heap)} boxes without meeting "
                    f"rel_tol={self.cfg.rel_tol:g}"
                )
            neg_error, _, lower, upper, value, box_diagonal = heapq.heappop(heap)
            total_value -= value
            total_error += neg_error
            diagonal -= box_diagonal
            axis = int(np.argmax(upper - lower))
            middle = 0.5 * (lower[axis] + upper[axis])
            left_upper = upper.copy()
            left_upper[axis] = middle
            right_lower = lower.copy()
            right_lower[axis] = middle
            push(lower, left_upper)
            push(right_lower, upper)

        imag = 0.0
        if self.cfg.check_imag:
            imag = self._adaptive_imag(heap, query)
        return QuadratureResult(
            value=2.0 * total_value,
            est_error=2.0 * total_error,
            imag_residue=imag,
            diagonal=2.0 * diagonal,
        )

    def _adaptive_imag(
        self,
        heap: list[tuple[float, int, FloatArray, FloatArray, float, float]],
        query: LambdaQuery,
    ) -> float:
        low_order = ADAPTIVE_ORDERS[0]
        x, w = gauss_legendre(low_order)
        residue = 0.0
        for _, _, lower, upper, _, _ in heap:
            half = 0.5 * (upper - lower)
            rules = [(lower[d] + half[d] * (x + 1.0), half[d] * w) for d in range(self.k)]
            nodes, weights = tensor_rule(rules)
            plus = np.exp(self.envelope.log_values(self.envelope.prepare(nodes), [query])[0])
            minus = np.exp(self.envelope.log_values(self.envelope.prepare(-nodes), [query])[0])
            residue += float(np.sum(weights * (plus - minus) * np.sin(nodes @ query.omega)))
        return abs(residue)
