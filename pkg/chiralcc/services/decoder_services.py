"""
Single-Shot Decoding Service

Noise sampling, meta-check syndrome repair and the two-stage decoder for the
qubit XYZ color code, plus the Monte Carlo driver that aggregates trials.

Pipeline per trial:
- Sample iid single-site Pauli errors (rate p) and syndrome flips (rate q)
- Repair the measured syndrome: violated volume meta-checks are paired by
  minimum-weight perfect matching on the dual graph (pymatching)
- Loop stage: each connected loop of excited faces is cleared by a Pauli solved on
  the sites it encloses, innermost sites first; loops that no local Pauli clears stay
- Fermion stage: point-like triangle excitations are paired by minimum-weight
  matching (networkx) and joined with string operators
- Loops left behind by the fermion strings are cleared as in the loop stage
- A final decode from the perfect syndrome of the residual decides success

Usage:
    from chiralcc.services.decoder_services import NoiseModel, run_experiment

    summary = run_experiment(code, NoiseModel(p=0.001, q=0.001, seed=7), trials=1000)
    summary.failures, summary.ci_low, summary.ci_high
"""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import networkx as nx
import numpy as np
from pymatching import Matching

from ..codes.analysis import logical_class, logical_structure
from ..conf import get_setting, get_thread_count
from ..exceptions import (ChiralccError, ConstructionError, ParameterError, StructureError,
                          UnsupportedError)
from ..linalg import ModularSystem
from ..pauli import PauliOperator, multiply, product
from ..topo.operators import (LatticePath, SyndromeConfig, check_metachecks, path_face,
                              shortest_path, string_operator, syndrome_of)
from ..utils import service_result

logger = logging.getLogger(__name__)

# Two-sided 95% normal quantile for Wilson intervals
WILSON_Z = 1.959963984540054


# ===============================
# Noise
# ===============================

@dataclass(frozen=True)
class NoiseModel:
    """
    Code-capacity noise with faulty syndrome readout.

    Args:
        p: Per-site error rate, uniform over the d^2 - 1 non-identity Paulis
        q: Per-face flip rate, uniform over the d - 1 nonzero shifts
        seed: Root seed of the trial streams
    """

    p: float = 0.0
    q: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name in ('p', 'q'):
            value = getattr(self, name)
            if not 0.0 <= float(value) <= 1.0:
                raise ParameterError(f"Noise rate {name}={value} is outside [0, 1]")
        if int(self.seed) < 0:
            raise ParameterError(f"Seed must be non-negative, got {self.seed}")

    def to_dict(self):
        return {'p': float(self.p), 'q': float(self.q), 'seed': int(self.seed)}


def sample_trial(code, noise, rng=None):
    """
    Sample one error and its noisy syndrome.

    Every draw is made regardless of the rates, so a seed fixes the whole stream.

    Args:
        code: StabilizerCode with face generators
        noise: NoiseModel
        rng: numpy Generator (defaults to one seeded from noise.seed)

    Returns:
        tuple (error PauliOperator, measured SyndromeConfig)
    """
    rng = rng if rng is not None else np.random.default_rng(noise.seed)
    d, n, m = code.d, code.n, len(code)
    hits = rng.random(n) < noise.p
    kinds = rng.integers(1, d * d, size=n)
    x = np.where(hits, kinds // d, 0)
    z = np.where(hits, kinds % d, 0)
    error = PauliOperator.weyl(d, x, z)

    true = syndrome_of(code, error)
    flips = rng.random(m) < noise.q
    shifts = rng.integers(1, d, size=m)
    measured = SyndromeConfig(true.values + np.where(flips, shifts, 0), d, true.face_ids)
    return error, measured


# ===============================
# Syndrome Repair
# ===============================

def _volume_matching(lattice):
    return Matching(lattice.volume_face_matrix())


def _repair(lattice, measured, matching):
    if measured.d != 2:
        raise UnsupportedError(f"Syndrome repair is implemented for qubits, got d={measured.d}")
    report = check_metachecks(lattice, measured)
    if report.valid:
        return measured
    if lattice.is_closed and len(report.violations) % 2:
        raise ConstructionError(f"Odd number ({len(report.violations)}) of meta-check "
                                f"violations on closed lattice {lattice.name}")
    flips = np.asarray(matching.decode(report.sums % 2), dtype=np.int64)
    vector = np.mod(measured.face_vector(lattice) + flips, 2)
    values = np.array([vector[f] if f >= 0 else measured.values[k]
                       for k, f in enumerate(measured.face_ids)], dtype=np.int64)
    repaired = SyndromeConfig(values, 2, measured.face_ids)
    if not check_metachecks(lattice, repaired).valid:
        raise ConstructionError("Repaired syndrome still violates meta-checks")
    logger.debug(f"Repaired {len(report.violations)} violations with {int(flips.sum())} flips")
    return repaired


def repair_syndrome(lattice, measured):
    """
    Pair violated meta-checks by minimum-weight matching and flip the faces between them.

    Args:
        lattice: ColorLattice the syndrome lives on
        measured: SyndromeConfig with d = 2

    Returns:
        SyndromeConfig satisfying every volume meta-check

    Raises:
        UnsupportedError: d != 2
        ConstructionError: odd violation count on a closed lattice
    """
    return _repair(lattice, measured, _volume_matching(lattice))


# ===============================
# Decoder
# ===============================

@dataclass(frozen=True)
class DecodeOutcome:
    """Correction found by the decoder; ``remaining`` is what neither stage removed."""

    correction: PauliOperator
    remaining: SyndromeConfig
    fermion_pairs: tuple = ()

    @property
    def converged(self):
        return self.remaining.is_zero()


@dataclass(frozen=True)
class TrialRecord:
    """
    One decoded trial.

    ``residual`` is correction * error after the final perfect-syndrome pass;
    ``residual_weight`` is the weight of correction * error after the single-shot round.
    """

    index: int
    error: PauliOperator
    true_syndrome: SyndromeConfig
    measured: SyndromeConfig
    repaired: SyndromeConfig
    correction: PauliOperator
    residual: PauliOperator
    residual_weight: int
    success: bool
    logical_label: str

    def to_dict(self):
        return {
            'trial': self.index,
            'error': self.error.to_dict(),
            'true_syndrome': self.true_syndrome.to_dict(),
            'measured_syndrome': self.measured.to_dict(),
            'repaired_syndrome': self.repaired.to_dict(),
            'correction': self.correction.to_dict(),
            'residual': self.residual.to_dict(),
            'residual_weight': self.residual_weight,
            'success': self.success,
            'logical': self.logical_label,
        }


class SingleShotDecoder:
    """
    Decoder bound to one qubit code; caches distances and the matching graph.

    Args:
        code: StabilizerCode with d = 2 whose generators are lattice faces
    """

    def __init__(self, code):
        if code.d != 2:
            raise UnsupportedError(f"Active decoding is implemented for qubits, got d={code.d}")
        if code.lattice is None or code.natives not in ('xyz', 'chiral'):
            raise ParameterError(f"Code {code.name} has no lattice strings to decode with")
        self.code = code
        self.lattice = code.lattice
        self.max_margin = get_setting('LOCAL_SOLVE_MAX_MARGIN')
        # Matching keeps mutable search state between calls
        self._matching_lock = threading.Lock()

    @cached_property
    def matching(self):
        return _volume_matching(self.lattice)

    @cached_property
    def distances(self):
        return dict(nx.all_pairs_shortest_path_length(self.lattice.vertex_graph))

    @cached_property
    def structure(self):
        return logical_structure(self.code)

    def warm_up(self):
        """Build every cache before the decoder is shared between threads."""
        return self.matching, self.distances, self.structure, self.lattice.volume_graph

    # ==================== Stages ====================

    def repair(self, measured):
        with self._matching_lock:
            return _repair(self.lattice, measured, self.matching)

    def _clusters(self, residual, face_rows):
        """Excited faces grouped into loops that meet in a shared volume."""
        excited = [f for f, k in sorted(face_rows.items()) if residual[k]]
        graph = nx.Graph()
        graph.add_nodes_from(excited)
        by_volume = {}
        for f in excited:
            for c in self.lattice.faces[f].volumes:
                by_volume.setdefault(c, []).append(f)
        for faces in by_volume.values():
            nx.add_path(graph, faces)
        return sorted(sorted(component) for component in nx.connected_components(graph))

    def _regions(self, cluster):
        """
        Site sets to clear a cluster on, innermost first.

        Sites touched by the most cluster faces come first, then the cluster's
        volumes grown one volume hop at a time up to the margin limit.
        """
        lattice = self.lattice
        counts = {}
        for f in cluster:
            for v in lattice.faces[f].vertices:
                counts[v] = counts.get(v, 0) + 1
        for level in sorted(set(counts.values()), reverse=True):
            yield sorted(v for v, c in counts.items() if c >= level)
        volumes = {c for f in cluster for c in lattice.faces[f].volumes}
        for margin in range(self.max_margin + 1):
            reach = nx.multi_source_dijkstra_path_length(lattice.volume_graph, volumes,
                                                         cutoff=margin)
            sites = sorted({v for c in reach for v in lattice.volumes[c].vertices})
            yield sites
            if len(sites) == lattice.n:
                return

    def _interior_correction(self, cluster, face_rows):
        """Pauli inside a cluster's loop whose syndrome is exactly that cluster, or None."""
        code = self.code
        target = set(cluster)
        tried = set()
        for sites in self._regions(cluster):
            if tuple(sites) in tried:
                continue
            tried.add(tuple(sites))
            faces = sorted({f for v in sites for f in self.lattice.faces_of(v) if f in face_rows})
            if not target.issubset(faces):
                continue
            rows = [face_rows[f] for f in faces]
            b = np.array([1 if f in target else 0 for f in faces], dtype=np.int64)
            matrix = np.hstack([code.gz[rows][:, sites], code.gx[rows][:, sites]])
            result = ModularSystem(matrix, 2).solve(b)
            if result.feasible:
                k = len(sites)
                x = np.zeros(code.n, dtype=np.int64)
                z = np.zeros(code.n, dtype=np.int64)
                x[sites] = result.x[:k]
                z[sites] = result.x[k:]
                return PauliOperator.weyl(2, x, z)
        return None

    def _shrink(self, residual, face_rows):
        """Clear every loop that a Pauli in its interior can remove; odd loops stay."""
        operators = []
        for cluster in self._clusters(residual, face_rows):
            op = self._interior_correction(cluster, face_rows)
            if op is None:
                continue
            residual = np.mod(residual + self.code.syndrome(op), 2)
            operators.append(op)
        return residual, operators

    def _triangles(self, residual, face_rows):
        excited = {f for f, k in face_rows.items() if residual[k]}
        used = set()
        triangles = []
        for edge in self.lattice.edges:
            faces = self.lattice.faces_of_edge(edge.id)
            if len(faces) == 3 and excited.issuperset(faces) and not used.intersection(faces):
                triangles.append(edge.id)
                used.update(faces)
        return triangles

    def _edge_distance(self, e1, e2):
        ends1 = self.lattice.edges[e1].vertices
        ends2 = self.lattice.edges[e2].vertices
        return min(self.distances[a].get(b, np.inf) for a in ends1 for b in ends2)

    def _pair_string(self, e1, e2):
        """Shortest string whose end edges are e1 and e2."""
        lattice = self.lattice
        best = None
        for s1 in lattice.edges[e1].vertices:
            for s2 in lattice.edges[e2].vertices:
                o1, o2 = lattice.other_end(e1, s1), lattice.other_end(e2, s2)
                try:
                    if s1 == s2:
                        path = LatticePath((s1,), (), False, (e1, e2))
                        path_face(lattice, s1, e1, e2)
                    else:
                        avoid = {o1, o2} - {s1, s2}
                        path = shortest_path(lattice, s1, s2, avoid=avoid, end_edges=(e1, e2))
                except (StructureError, ParameterError):
                    continue
                if best is None or len(path) < len(best):
                    best = path
        if best is None:
            raise StructureError(f"No string joins edges {e1} and {e2}")
        return string_operator(lattice, best, self.code.d, self.code.alpha, self.code.natives)

    def decode(self, syndrome):
        """
        Correction whose syndrome equals the given (meta-check consistent) syndrome.

        Args:
            syndrome: SyndromeConfig aligned with the code generators

        Returns:
            DecodeOutcome; a nonzero ``remaining`` marks a decoder failure
        """
        code = self.code
        residual = np.mod(np.asarray(syndrome.values, dtype=np.int64), 2)
        face_rows = {f: k for k, f in enumerate(syndrome.face_ids) if f >= 0}
        residual, operators = self._shrink(residual, face_rows)

        pairs = ()
        triangles = self._triangles(residual, face_rows)
        if len(triangles) >= 2:
            graph = nx.Graph()
            graph.add_nodes_from(triangles)
            for i, e1 in enumerate(triangles):
                for e2 in triangles[i + 1:]:
                    graph.add_edge(e1, e2, weight=self._edge_distance(e1, e2))
            pairs = tuple(sorted(tuple(sorted(pair)) for pair in nx.min_weight_matching(graph)))
            for e1, e2 in pairs:
                string = self._pair_string(e1, e2)
                operators.append(string)
                residual = np.mod(residual + code.syndrome(string), 2)
            residual, more = self._shrink(residual, face_rows)
            operators.extend(more)
        total = product(operators, code.n, 2)
        correction = PauliOperator.weyl(2, total.x, total.z)
        remaining = SyndromeConfig(residual, 2, syndrome.face_ids)
        if not remaining.is_zero():
            logger.debug(f"Decoder left {remaining.weight} excited faces on {code.name}")
        return DecodeOutcome(correction=correction, remaining=remaining, fermion_pairs=pairs)

    # ==================== Trials ====================

    def run_trial(self, noise, rng, index=0):
        """Sample, repair, decode and judge one trial."""
        error, measured = sample_trial(self.code, noise, rng)
        return self.record_trial(error, measured, index)

    def record_trial(self, error, measured, index=0):
        """Repair and decode a measured syndrome of ``error``, then judge the residual."""
        code = self.code
        true = syndrome_of(code, error)
        repaired = self.repair(measured)
        first = self.decode(repaired)
        after = multiply(first.correction, error)

        cleanup = self.decode(syndrome_of(code, after))
        correction = multiply(cleanup.correction, first.correction)
        residual = multiply(correction, error)
        if not syndrome_of(code, residual).is_zero():
            label = 'syndrome'
        else:
            cls = logical_class(self.structure, residual)
            label = 'trivial' if not cls.any() else ''.join(str(int(c)) for c in cls)
        return TrialRecord(index=index, error=error, true_syndrome=true, measured=measured,
                           repaired=repaired, correction=correction, residual=residual,
                           residual_weight=after.weight, success=label == 'trivial',
                           logical_label=label)


def decode(code, syndrome):
    """
    Two-stage decode of a meta-check consistent syndrome.

    Returns:
        DecodeOutcome
    """
    return SingleShotDecoder(code).decode(syndrome)


# ===============================
# Experiments
# ===============================

def wilson_interval(failures, trials, z=WILSON_Z):
    """
    Wilson score interval for a binomial rate.

    Returns:
        tuple (low, high)
    """
    if trials <= 0:
        return 0.0, 1.0
    rate = failures / trials
    denominator = 1 + z * z / trials
    center = (rate + z * z / (2 * trials)) / denominator
    spread = z * np.sqrt(rate * (1 - rate) / trials + z * z / (4 * trials * trials)) / denominator
    return max(0.0, float(center - spread)), min(1.0, float(center + spread))


@dataclass
class ExperimentSummary:
    """Aggregate of a Monte Carlo run; records are kept in trial order."""

    trials: int
    failures: int
    histogram: dict = field(default_factory=dict)
    records: list = field(default_factory=list)

    @property
    def rate(self):
        return self.failures / self.trials if self.trials else 0.0

    @property
    def interval(self):
        return wilson_interval(self.failures, self.trials)

    @property
    def ci_low(self):
        return self.interval[0]

    @property
    def ci_high(self):
        return self.interval[1]

    @property
    def max_residual_weight(self):
        return max(self.histogram, default=0)

    def to_dict(self):
        return {
            'trials': self.trials,
            'failures': self.failures,
            'failure_rate': self.rate,
            'ci_low': self.ci_low,
            'ci_high': self.ci_high,
            'max_residual_weight': self.max_residual_weight,
            'residual_weight_histogram': {str(k): v for k, v in sorted(self.histogram.items())},
        }


def run_experiment(code, noise, trials, threads=None):
    """
    Run independent trials in a thread pool and aggregate them.

    Each trial draws from its own child of ``SeedSequence(noise.seed)``, so the
    result does not depend on the worker count.

    Args:
        code: Qubit StabilizerCode
        noise: NoiseModel
        trials: Number of trials (at least 1)
        threads: Worker cap (defaults to the THREADS setting)

    Returns:
        ExperimentSummary
    """
    if int(trials) < 1:
        raise ParameterError(f"Trial count must be at least 1, got {trials}")
    decoder = SingleShotDecoder(code)
    decoder.warm_up()
    streams = np.random.SeedSequence(int(noise.seed)).spawn(int(trials))
    workers = max(1, min(threads or get_thread_count(), int(trials)))
    logger.info(f"Decoding {trials} trials on {code.name} (p={noise.p}, q={noise.q}) "
                f"with {workers} workers")

    def one(index):
        return decoder.run_trial(noise, np.random.default_rng(streams[index]), index)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        records = list(pool.map(one, range(int(trials))))

    summary = ExperimentSummary(trials=int(trials), failures=0)
    for record in records:
        summary.failures += 0 if record.success else 1
        weight = record.residual_weight
        summary.histogram[weight] = summary.histogram.get(weight, 0) + 1
    summary.records = records
    logger.info(f"{code.name}: {summary.failures}/{summary.trials} failures")
    return summary


def run_decode_service(code, noise, trials, threads=None):
    """
    Service entry for the decode command.

    Returns:
        dict from service_result with ``summary`` and ``records``
    """
    try:
        summary = run_experiment(code, noise, trials, threads)
    except ChiralccError as exc:
        logger.exception(f"Decoding failed on {code.name}: {exc}")
        return service_result("failed", str(exc))
    message = f"Decoded {summary.trials} trials: {summary.failures} logical failures"
    return service_result(message=message, summary=summary, records=summary.records)
