"""
Ground-State Preparation Service

Local preparation channel for the odd-d chiral color code on a closed lattice.
Every face stabilizer is measured on the product state |0...0>, and the random
outcomes are then removed by a correction whose pieces each depend only on nearby
syndrome values.

Stages:
- ac-faces: Z on every excited AC face, at the site touching the most excited faces
- a-volumes: charge on the AB faces of each A volume is pushed along a spanning
  tree of its faces and vanishes at the root
- b-volumes: the same for the BD faces of each B volume
- block-loops: the remaining CD loops are cut at block interfaces, closed with
  triangle caps that cancel between neighbouring blocks, and removed by a local
  linear solve per block

Every unit of a stage is computed from the syndrome as it stood when the stage
began, so the locality audit can replay it with distant values randomized.

Usage:
    from chiralcc.services.prep_services import prepare_ground_state, locality_audit

    transcript = prepare_ground_state(build_torus(2, 2, 2), d=3, alpha=1, seed=4)
    transcript.verified, locality_audit(transcript).radius
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd

import networkx as nx
import numpy as np

from ..codes.builders import build_chiral
from ..conf import get_block_size, get_setting
from ..exceptions import ChiralccError, ConstructionError, ParameterError, UnsupportedError
from ..linalg import ModularSystem, kernel_mod
from ..pauli import PauliOperator, product
from ..topo.operators import SyndromeConfig
from ..utils import service_result

logger = logging.getLogger(__name__)

STAGES = ('ac-faces', 'a-volumes', 'b-volumes', 'block-loops')


# ===============================
# Transcripts
# ===============================

@dataclass(frozen=True)
class CorrectionUnit:
    """
    One local correction: where it is anchored, what it read and where it acted.

    ``anchor`` holds volume ids, ``consumed`` face ids, ``support`` lattice sites.
    ``key`` names the unit within its stage for replay.
    """

    anchor: tuple
    consumed: tuple
    support: tuple
    key: object = None

    def to_dict(self):
        return {'anchor': list(self.anchor), 'consumed': list(self.consumed),
                'support': list(self.support)}


@dataclass
class PrepStage:
    name: str
    units: list = field(default_factory=list)

    def to_dict(self):
        return {'name': self.name, 'units': [unit.to_dict() for unit in self.units]}


@dataclass
class PrepTranscript:
    """
    Record of one preparation run.

    ``phase_exponent`` is the raw tau exponent of the total correction; it is kept
    for later study and not interpreted. ``inputs`` holds the syndrome each stage
    started from and ``preparer`` the channel that produced the run; the locality
    audit replays units from both.
    """

    lattice: object
    d: int
    alpha: int
    seed: int
    block_size: int
    sampled: SyndromeConfig
    stages: tuple
    correction: PauliOperator
    final: SyndromeConfig
    radius: int = None
    inputs: tuple = None
    preparer: object = field(default=None, repr=False)

    @property
    def verified(self):
        return self.final.is_zero()

    @property
    def phase_exponent(self):
        return self.correction.phase

    def to_dict(self):
        return {
            'lattice': self.lattice.name,
            'd': self.d,
            'alpha': self.alpha,
            'seed': self.seed,
            'block_size': self.block_size,
            'sampled_syndrome': self.sampled.to_dict(),
            'stages': [stage.to_dict() for stage in self.stages],
            'final_syndrome': self.final.to_dict(),
            'verified': self.verified,
            'radius': self.radius,
            'phase_exponent': self.phase_exponent,
            'correction_weight': self.correction.weight,
        }


# ===============================
# Preparation
# ===============================

def _check_regime(lattice, d, alpha):
    if d % 2 == 0:
        raise UnsupportedError(f"Ground-state preparation needs odd d, got d={d}")
    if gcd(d, alpha) != 1:
        raise UnsupportedError(f"Ground-state preparation needs gcd(d, alpha) = 1, "
                               f"got d={d}, alpha={alpha}")
    if not lattice.is_closed:
        raise UnsupportedError(f"Ground-state preparation needs a closed lattice, "
                               f"{lattice.name} has boundaries")
    if lattice.geometry is None or lattice.geometry.volume_cells is None:
        raise ParameterError(f"Lattice {lattice.name} carries no cell coordinates for blocking")


class GroundStatePreparer:
    """
    Preparation channel bound to one lattice; caches the sampling and block systems.

    Args:
        lattice: Closed ColorLattice with geometry
        d: Odd qudit dimension
        alpha: Chirality coprime to d
        block_size: Block edge in primitive cells (defaults to the BLOCK_SIZE setting)
    """

    def __init__(self, lattice, d, alpha=1, block_size=None):
        _check_regime(lattice, d, alpha)
        self.lattice = lattice
        self.d = int(d)
        self.alpha = int(alpha)
        self.block_size = int(block_size or get_block_size())
        if self.block_size < 1:
            raise ParameterError(f"Block size must be at least 1, got {block_size}")
        self.max_margin = get_setting('LOCAL_SOLVE_MAX_MARGIN')
        self.code = build_chiral(lattice, self.d, self.alpha)
        self.half = (self.d + 1) // 2
        self._systems = {}

    # ==================== Sampling ====================

    def _product_phase(self, coefficients):
        """
        tau exponent of prod_g S_g^a_g taken in generator order.

        Each power contributes its own phase; moving the accumulated Z part past
        every later X part contributes omega^(z . x).
        """
        code = self.code
        d = self.d
        a = np.asarray(coefficients, dtype=np.int64)
        xs = np.mod(a[:, None] * code.gx, d)
        zs = np.mod(a[:, None] * code.gz, d)
        phases = np.array([g.phase for g in code.generators], dtype=np.int64)
        xz = np.einsum('ij,ij->i', code.gx, code.gz)
        own = phases * a + xz * a * (a - 1)
        before = np.cumsum(zs, axis=0) - zs
        cross = np.einsum('ij,ij->', before, xs)
        return int(own.sum() + 2 * cross) % (2 * d)

    @cached_property
    def _sampler(self):
        """Affine space of syndromes reachable from |0...0>."""
        d = self.d
        relations = kernel_mod(self.code.gx.T, d)
        rows, rhs = [], []
        for a in relations.vectors:
            x = np.mod(a @ self.code.gx, d)
            if x.any():
                raise ConstructionError("Kernel vector of Gx^T has X support")
            phase = self._product_phase(a)
            if phase % 2:
                raise ConstructionError("Z-type stabilizer product has a non-omega phase")
            rows.append(a)
            rhs.append((phase // 2) % d)
        m = len(self.code)
        if not rows:
            return np.zeros(m, dtype=np.int64), ModularSystem(np.zeros((1, m)), d).kernel()
        system = ModularSystem(np.array(rows, dtype=np.int64), d)
        solution = system.solve(np.array(rhs, dtype=np.int64))
        if not solution.feasible:
            raise ConstructionError(f"Measurement outcomes on |0> are inconsistent "
                                    f"(row {solution.row} mod {solution.modulus})")
        return solution.x, solution.kernel

    def sample_syndrome(self, rng):
        """
        Uniformly random outcome of measuring every face stabilizer on |0...0>.

        Faces with Z-only generators always read 0; the rest are drawn from the
        affine solution space of the Z-type relations.
        """
        base, kernel = self._sampler
        values = base.copy()
        for vector, order in zip(kernel.vectors, kernel.orders):
            values = values + int(rng.integers(0, order)) * vector
        return SyndromeConfig(values, self.d, tuple(range(len(self.code))))

    # ==================== Lattice Data ====================

    @cached_property
    def site_volumes(self):
        volumes = {v: [] for v in range(self.lattice.n)}
        for volume in self.lattice.volumes:
            for v in volume.vertices:
                volumes[v].append(volume.id)
        return volumes

    def _faces_of_color(self, volume, colors):
        return [f for f in volume.faces if self.lattice.faces[f].colors == colors]

    def _unit_coefficient(self, face, sites, signs):
        """Syndrome on ``face`` of prod Z_v^sign_v, which must be a unit."""
        gx = self.code.gx
        coef = -sum(int(gx[face, v]) * s for v, s in zip(sites, signs)) % self.d
        if gcd(coef, self.d) != 1:
            raise ConstructionError(f"Correction on face {face} has non-invertible weight {coef}")
        return coef

    def _z_operator(self, exponents):
        z = np.zeros(self.lattice.n, dtype=np.int64)
        for v, t in exponents.items():
            z[v] += t
        return PauliOperator(self.d, np.zeros(self.lattice.n, dtype=np.int64), z)

    # ==================== Stages ====================

    def _ac_unit(self, f, snapshot):
        """
        Z on an excited AC face at the site touching the most excited faces.

        A single Z error excites its AC face together with the AB, BD and CD faces
        through the same site, so that site wins and the correction undoes the error.
        """
        value = int(snapshot[f])
        if not value:
            return None
        lattice = self.lattice
        v = max(sorted(lattice.faces[f].vertices),
                key=lambda u: sum(1 for g in lattice.faces_of(u) if snapshot[g]))
        coef = self._unit_coefficient(f, (v,), (1,))
        return self._z_operator({v: -value * pow(coef, -1, self.d)})

    def _volume_unit(self, volume, colors, edge_omit, snapshot):
        """Push one face color's charge around a volume onto its root face; it must vanish."""
        lattice = self.lattice
        faces = self._faces_of_color(volume, colors)
        if not faces or not any(snapshot[f] for f in faces):
            return None
        members = set(volume.vertices)
        graph = nx.Graph()
        graph.add_nodes_from(faces)
        for v in volume.vertices:
            e = int(lattice.tet_edges[v, edge_omit])
            if e < 0:
                continue
            w = lattice.other_end(e, v)
            if w not in members:
                continue
            fv, fw = lattice.face_at(v, colors), lattice.face_at(w, colors)
            if fv == fw:
                continue
            known = graph.get_edge_data(fv, fw)
            if known is None or e < known['edge']:
                graph.add_edge(fv, fw, edge=e)
        root = min(faces)
        tree = list(nx.bfs_edges(graph, root, sort_neighbors=sorted))
        if len(tree) != len(faces) - 1:
            raise ConstructionError(f"Faces {colors} of volume {volume.id} are not connected")
        gx = self.code.gx
        local = {f: int(snapshot[f]) for f in faces}
        exponents = {}
        for parent, child in reversed(tree):
            if not local[child]:
                continue
            e = graph.edges[parent, child]['edge']
            sites = lattice.edges[e].vertices
            signs = tuple(int(lattice.lam[v]) for v in sites)
            coef = self._unit_coefficient(child, sites, signs)
            t = -local[child] * pow(coef, -1, self.d) % self.d
            for v, s in zip(sites, signs):
                exponents[v] = exponents.get(v, 0) + t * s
                for g in faces:
                    local[g] = (local[g] - t * s * int(gx[g, v])) % self.d
        if local[root]:
            raise ConstructionError(f"Volume {volume.id} keeps charge {local[root]} on "
                                    f"its {colors} faces")
        return self._z_operator(exponents) if exponents else None

    # ==================== Block Loop Removal ====================

    @cached_property
    def blocks(self):
        """Block key -> volume ids, from the cell coordinates of each volume."""
        cells = np.asarray(self.lattice.geometry.volume_cells, dtype=np.int64)
        blocks = {}
        for c in range(len(self.lattice.volumes)):
            key = tuple(int(k) for k in cells[c] // self.block_size)
            blocks.setdefault(key, []).append(c)
        return {key: sorted(volumes) for key, volumes in sorted(blocks.items())}

    @cached_property
    def caps(self):
        """Per D volume: the (AD, CD, AC) faces around its lowest ACD edge."""
        lattice = self.lattice
        caps = {}
        for volume in lattice.volumes:
            if volume.color != 'D':
                continue
            edges = [int(lattice.tet_edges[v, 1]) for v in volume.vertices]
            e = min(e for e in edges if e >= 0)
            by_color = {lattice.faces[f].colors: f for f in lattice.faces_of_edge(e)}
            caps[volume.id] = (by_color['AD'], by_color['CD'], by_color['AC'])
        return caps

    def _block_layout(self, key):
        """Owned CD faces, neighbouring D volumes and the static base region of a block."""
        lattice = self.lattice
        volumes = self.blocks[key]
        owned = []
        d_volumes = set()
        for c in volumes:
            if lattice.volumes[c].color != 'C':
                continue
            for f in self._faces_of_color(lattice.volumes[c], 'CD'):
                owned.append(f)
                d_volumes.update(x for x in lattice.faces[f].volumes if x != c)
        base = set(volumes) | d_volumes
        for delta in d_volumes:
            for f in self.caps[delta]:
                base.update(lattice.faces[f].volumes)
        return sorted(owned), sorted(d_volumes), sorted(base)

    @cached_property
    def layouts(self):
        return {key: self._block_layout(key) for key in self.blocks}

    def _local_system(self, key, margin):
        cached = self._systems.get((key, margin))
        if cached is not None:
            return cached
        lattice = self.lattice
        base = self.layouts[key][2]
        reach = nx.multi_source_dijkstra_path_length(lattice.volume_graph, set(base), cutoff=margin)
        region = sorted(reach)
        sites = sorted({v for c in region for v in lattice.volumes[c].vertices})
        rows = sorted({f for v in sites for f in lattice.faces_of(v)})
        code = self.code
        matrix = np.hstack([code.gz[rows][:, sites], -code.gx[rows][:, sites]])
        entry = (sites, rows, ModularSystem(matrix, self.d), len(region) == len(lattice.volumes))
        self._systems[(key, margin)] = entry
        return entry

    def _block_piece(self, key, snapshot):
        lattice = self.lattice
        owned, d_volumes, _ = self.layouts[key]
        piece = np.zeros(len(self.code), dtype=np.int64)
        piece[owned] = snapshot[owned]
        owned_set = set(owned)
        for delta in d_volumes:
            partial = sum(int(snapshot[f]) for f in lattice.volumes[delta].faces if f in owned_set)
            if partial % self.d == 0:
                continue
            f_ad, f_cd, f_ac = self.caps[delta]
            share = self.half * -partial
            piece[f_ad] += share
            piece[f_cd] += share
            piece[f_ac] -= share
        return np.mod(piece, self.d), owned

    def _solve_block(self, key, piece):
        support = set(np.flatnonzero(piece))
        for margin in range(1, self.max_margin + 1):
            sites, rows, system, complete = self._local_system(key, margin)
            if not support.issubset(rows):
                continue
            result = system.solve(np.mod(-piece[rows], self.d))
            if result.feasible:
                k = len(sites)
                x = np.zeros(self.lattice.n, dtype=np.int64)
                z = np.zeros(self.lattice.n, dtype=np.int64)
                x[sites] = result.x[:k]
                z[sites] = result.x[k:]
                return PauliOperator.weyl(self.d, x, z)
            if complete:
                break
        raise ConstructionError(f"Block {key} loop piece has no local correction within "
                                f"margin {self.max_margin}")

    def _block_unit(self, key, snapshot):
        piece, _ = self._block_piece(key, snapshot)
        if not piece.any():
            return None
        return self._solve_block(key, piece)

    # ==================== Units ====================

    @cached_property
    def units(self):
        """Stage name -> (key, anchor volumes, consumed faces) of every unit it may run."""
        lattice = self.lattice
        units = {name: [] for name in STAGES}
        for face in lattice.faces:
            if face.colors == 'AC':
                anchor = next(c for c in face.volumes if lattice.volumes[c].color == 'A')
                units['ac-faces'].append((face.id, (anchor,), (face.id,)))
        for volume in lattice.volumes:
            for color, name, colors in (('A', 'a-volumes', 'AB'), ('B', 'b-volumes', 'BD')):
                if volume.color == color:
                    consumed = tuple(sorted(self._faces_of_color(volume, colors)))
                    units[name].append((volume.id, (volume.id,), consumed))
        for key in self.blocks:
            units['block-loops'].append((key, tuple(self.blocks[key]), tuple(self.layouts[key][0])))
        return units

    def unit_operator(self, name, key, snapshot):
        """
        Correction of one unit computed from the syndrome its stage started with.

        Returns:
            PauliOperator, or None when the unit has nothing to do

        Raises:
            ConstructionError: the syndrome cannot be cleared locally
        """
        if name == 'ac-faces':
            return self._ac_unit(key, snapshot)
        if name == 'a-volumes':
            return self._volume_unit(self.lattice.volumes[key], 'AB', 1, snapshot)
        if name == 'b-volumes':
            return self._volume_unit(self.lattice.volumes[key], 'BD', 3, snapshot)
        if name == 'block-loops':
            return self._block_unit(key, snapshot)
        raise ParameterError(f"Unknown preparation stage {name!r}")

    # ==================== Entry Points ====================

    def correct(self, sampled, seed=None):
        """
        Run the four stages on a given syndrome.

        Returns:
            PrepTranscript (``verified`` tells whether the final syndrome is zero)
        """
        if sampled.d != self.d or len(sampled.values) != len(self.code):
            raise ParameterError("Syndrome does not belong to this preparation code")
        syndrome = np.array(sampled.values, dtype=np.int64)
        stages = tuple(PrepStage(name) for name in STAGES)
        inputs, operators = [], []
        for stage in stages:
            if stage.name == 'block-loops':
                excited = {self.lattice.faces[f].colors for f in np.flatnonzero(syndrome)}
                if excited - {'CD'}:
                    raise ConstructionError(f"Faces {sorted(excited - {'CD'})} remain before "
                                            f"loop removal")
            snapshot = syndrome.copy()
            inputs.append(snapshot)
            for key, anchor, consumed in self.units[stage.name]:
                op = self.unit_operator(stage.name, key, snapshot)
                if op is None or op.is_identity():
                    continue
                syndrome = np.mod(syndrome + self.code.syndrome(op), self.d)
                operators.append(op)
                stage.units.append(CorrectionUnit(anchor, consumed,
                                                  tuple(int(v) for v in op.support), key=key))

        correction = product(operators, self.lattice.n, self.d)
        final = SyndromeConfig(np.mod(sampled.values + self.code.syndrome(correction), self.d),
                               self.d, sampled.face_ids)
        transcript = PrepTranscript(lattice=self.lattice, d=self.d, alpha=self.alpha, seed=seed,
                                    block_size=self.block_size, sampled=sampled, stages=stages,
                                    correction=correction, final=final, inputs=tuple(inputs),
                                    preparer=self)
        transcript.radius = locality_audit(transcript).radius
        if not transcript.verified:
            logger.warning(f"Preparation on {self.lattice.name} left {final.weight} excited faces")
        return transcript

    def prepare(self, seed=0, rng=None):
        rng = rng if rng is not None else np.random.default_rng(seed)
        return self.correct(self.sample_syndrome(rng), seed=seed)


def prepare_ground_state(lattice, d, alpha=1, seed=0, block_size=None):
    """
    Sample the |0...0> measurement outcome and correct it locally.

    Args:
        lattice: Closed ColorLattice
        d: Odd qudit dimension
        alpha: Chirality coprime to d
        seed: Sampling seed
        block_size: Loop-removal block edge in cells

    Returns:
        PrepTranscript

    Raises:
        UnsupportedError: even d, non-coprime alpha or an open lattice
    """
    return GroundStatePreparer(lattice, d, alpha, block_size).prepare(seed)


# ===============================
# Locality
# ===============================

@dataclass(frozen=True)
class LocalityReport:
    """Per-stage dependence radius, in face-sharing volume hops from each unit's anchor."""

    radius: int
    stages: dict

    def to_dict(self):
        return {'radius': self.radius, 'stages': dict(self.stages)}


def _face_distances(lattice, anchor):
    reach = nx.multi_source_dijkstra_path_length(lattice.volume_graph, set(anchor))
    return np.array([min(reach[c] for c in face.volumes) for face in lattice.faces],
                    dtype=np.int64)


def _replay_radius(preparer, name, key, snapshot, distance, rng, samples):
    """Least r at which randomizing every face beyond r leaves the unit's output unchanged."""
    reference = preparer.unit_operator(name, key, snapshot)
    farthest = int(distance.max(initial=0))
    for r in range(farthest + 1):
        outside = np.flatnonzero(distance > r)
        if not outside.size:
            return r
        for _ in range(samples):
            trial = snapshot.copy()
            trial[outside] = rng.integers(0, preparer.d, size=outside.size)
            try:
                output = preparer.unit_operator(name, key, trial)
            except ConstructionError:
                break
            if output != reference:
                break
        else:
            return r
    return farthest


def locality_audit(transcript, samples=None):
    """
    Dependence radius of every correction unit in a transcript.

    Each unit is recomputed from its stage's input syndrome with the values of all
    faces farther than r volume hops from its anchor randomized. The unit's radius
    is the least r at which every replay reproduces its correction.

    Args:
        transcript: PrepTranscript carrying its stage inputs and preparer
        samples: Replays per radius (defaults to the LOCALITY_AUDIT_SAMPLES setting)

    Returns:
        LocalityReport; an identity transcript has radius 0

    Raises:
        ParameterError: the transcript has units but nothing to replay them from
    """
    per_stage = {stage.name: 0 for stage in transcript.stages}
    if not any(stage.units for stage in transcript.stages):
        return LocalityReport(radius=0, stages=per_stage)
    preparer = transcript.preparer
    if preparer is None or transcript.inputs is None:
        raise ParameterError("Transcript carries no stage inputs to replay")
    samples = int(samples or get_setting('LOCALITY_AUDIT_SAMPLES'))
    rng = np.random.default_rng(0 if transcript.seed is None else transcript.seed)
    for snapshot, stage in zip(transcript.inputs, transcript.stages):
        for unit in stage.units:
            distance = _face_distances(transcript.lattice, unit.anchor)
            radius = _replay_radius(preparer, stage.name, unit.key, snapshot, distance, rng,
                                    samples)
            per_stage[stage.name] = max(per_stage[stage.name], radius)
    return LocalityReport(radius=max(per_stage.values()), stages=per_stage)


# ===============================
# Service
# ===============================

def run_prepare_service(lattice, d, alpha, trials, seed=0, block_size=None):
    """
    Prepare ``trials`` seeded ground states and verify each one.

    Returns:
        dict from service_result with ``transcripts``; status "failed" names the
        first run whose final syndrome is not zero
    """
    if int(trials) < 1:
        raise ParameterError(f"Trial count must be at least 1, got {trials}")
    try:
        preparer = GroundStatePreparer(lattice, d, alpha, block_size)
        seeds = np.random.SeedSequence(int(seed)).generate_state(int(trials), dtype=np.uint32)
        transcripts = [preparer.prepare(int(s)) for s in seeds]
    except ChiralccError as exc:
        logger.exception(f"Preparation failed on {lattice.name}: {exc}")
        return service_result("failed", str(exc))
    failed = [t for t in transcripts if not t.verified]
    passed = len(transcripts) - len(failed)
    message = f"{passed}/{len(transcripts)} runs reached the zero syndrome"
    if failed:
        return service_result("failed", message, transcripts=transcripts, failing=failed[0])
    return service_result(message=message, transcripts=transcripts)
