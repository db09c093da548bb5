import networkx as nx
import numpy as np
import pytest

from chiralcc.exceptions import ParameterError, UnsupportedError
from chiralcc.lattice import build_torus
from chiralcc.services import (GroundStatePreparer, PrepTranscript, locality_audit,
                               prepare_ground_state, run_prepare_service)
from chiralcc.pauli import PauliOperator, multiply
from chiralcc.services.prep_services import STAGES, CorrectionUnit, PrepStage
from chiralcc.topo import SyndromeConfig, syndrome_of


@pytest.fixture(scope='module')
def preparer(torus):
    return GroundStatePreparer(torus, 3, 1)


# ==================== Regime ====================

def test_even_dimension_is_unsupported(torus):
    with pytest.raises(UnsupportedError):
        GroundStatePreparer(torus, 4, 1)


def test_non_coprime_alpha_is_unsupported(torus):
    with pytest.raises(UnsupportedError):
        GroundStatePreparer(torus, 9, 3)


def test_open_lattice_is_unsupported(slab):
    with pytest.raises(UnsupportedError):
        prepare_ground_state(slab, 3, 1)


def test_block_size_must_be_positive(torus):
    with pytest.raises(ParameterError):
        GroundStatePreparer(torus, 3, 1, block_size=-1)


# ==================== Sampling ====================

def test_z_only_faces_always_read_zero(preparer, torus, rng):
    z_only = [f.id for f in torus.faces if f.colors in ('AD', 'BC')]
    for _ in range(5):
        sampled = preparer.sample_syndrome(rng)
        assert not sampled.values[z_only].any()


def test_sampling_is_seeded(preparer):
    first = preparer.sample_syndrome(np.random.default_rng(8))
    second = preparer.sample_syndrome(np.random.default_rng(8))
    assert (first.values == second.values).all()


# ==================== Blocks ====================

def test_unit_blocks_hold_one_cell(preparer):
    assert len(preparer.blocks) == 8
    for volumes in preparer.blocks.values():
        assert len(volumes) == 4


def test_caps_cover_every_d_volume(preparer, torus):
    d_volumes = [c.id for c in torus.volumes if c.color == 'D']
    assert sorted(preparer.caps) == d_volumes
    for f_ad, f_cd, f_ac in preparer.caps.values():
        assert [torus.faces[f].colors for f in (f_ad, f_cd, f_ac)] == ['AD', 'CD', 'AC']


# ==================== Preparation ====================

@pytest.mark.parametrize('seed', [0, 1, 2, 3, 4])
def test_preparation_reaches_zero_syndrome(preparer, seed):
    transcript = preparer.prepare(seed)
    assert transcript.verified
    assert [stage.name for stage in transcript.stages] == list(STAGES)
    assert transcript.radius <= preparer.block_size + 2


def test_first_stages_act_inside_their_anchor(preparer):
    report = locality_audit(preparer.prepare(6))
    assert report.stages['ac-faces'] <= 1
    assert report.stages['a-volumes'] == report.stages['b-volumes'] == 0
    assert report.radius <= preparer.block_size + 2


@pytest.mark.parametrize('site', [0, 5, 17, 40])
def test_single_z_error_is_undone_by_the_ac_stage(preparer, chiral3_torus, site):
    error = PauliOperator.single_site(chiral3_torus.n, 3, site, z=1)
    sampled = syndrome_of(chiral3_torus, error)
    transcript = preparer.correct(sampled)
    assert transcript.verified
    [unit] = transcript.stages[0].units
    assert unit.support == (site,)
    assert all(not stage.units for stage in transcript.stages[1:])
    assert transcript.correction.weight == 1
    assert multiply(transcript.correction, error).is_identity()


def test_audit_replays_units_against_far_syndrome(torus, chiral3_torus):
    reach = nx.single_source_shortest_path_length(torus.volume_graph, 0)
    distances = [min(reach[c] for c in face.volumes) for face in torus.faces]
    far = int(np.argmax(distances))
    distance = distances[far]
    assert distance >= 1

    class FarReader:
        d = 3

        def unit_operator(self, name, key, snapshot):
            return PauliOperator.single_site(torus.n, 3, 0, z=int(snapshot[far]))

    values = np.zeros(len(chiral3_torus), dtype=np.int64)
    values[far] = 1
    sampled = SyndromeConfig(values, 3, tuple(range(len(chiral3_torus))))
    stages = tuple(PrepStage(name) for name in STAGES)
    stages[0].units.append(CorrectionUnit((0,), (far,), (0,), key=far))
    transcript = PrepTranscript(lattice=torus, d=3, alpha=1, seed=2, block_size=1,
                                sampled=sampled, stages=stages, correction=None, final=sampled,
                                inputs=(values,) * len(STAGES), preparer=FarReader())
    assert locality_audit(transcript, samples=8).stages['ac-faces'] == distance


def test_audit_needs_replay_data(torus, chiral3_torus):
    values = np.zeros(len(chiral3_torus), dtype=np.int64)
    sampled = SyndromeConfig(values, 3, tuple(range(len(chiral3_torus))))
    stages = tuple(PrepStage(name) for name in STAGES)
    stages[0].units.append(CorrectionUnit((0,), (0,), (0,), key=0))
    transcript = PrepTranscript(lattice=torus, d=3, alpha=1, seed=0, block_size=1,
                                sampled=sampled, stages=stages, correction=None, final=sampled)
    with pytest.raises(ParameterError):
        locality_audit(transcript)


def test_zero_syndrome_needs_no_correction(preparer, chiral3_torus):
    sampled = SyndromeConfig(np.zeros(len(chiral3_torus), dtype=np.int64), 3,
                             tuple(range(len(chiral3_torus))))
    transcript = preparer.correct(sampled)
    assert transcript.verified
    assert transcript.correction.is_identity()
    assert all(not stage.units for stage in transcript.stages)
    assert transcript.radius == 0


def test_correct_rejects_foreign_syndromes(preparer, torus):
    with pytest.raises(ParameterError):
        preparer.correct(SyndromeConfig.from_faces(torus, 5, {0: 1}))


def test_transcript_document(preparer):
    document = preparer.prepare(3).to_dict()
    assert document['lattice'] == 'torus:2,2,2'
    assert document['verified'] is True
    assert document['block_size'] == 1
    assert [stage['name'] for stage in document['stages']] == list(STAGES)
    assert document['phase_exponent'] in range(6)


def test_empty_transcript_has_radius_zero(torus, chiral3_torus):
    empty = SyndromeConfig(np.zeros(len(chiral3_torus), dtype=np.int64), 3,
                           tuple(range(len(chiral3_torus))))
    transcript = PrepTranscript(lattice=torus, d=3, alpha=1, seed=0, block_size=1, sampled=empty,
                                stages=tuple(PrepStage(name) for name in STAGES),
                                correction=None, final=empty)
    report = locality_audit(transcript)
    assert report.radius == 0
    assert report.to_dict() == {'radius': 0, 'stages': {name: 0 for name in STAGES}}


# ==================== Service ====================

def test_prepare_service(torus):
    result = run_prepare_service(torus, 3, 1, trials=3, seed=5)
    assert result['status'] == 'success'
    assert len(result['transcripts']) == 3
    assert result['message'] == '3/3 runs reached the zero syndrome'


def test_prepare_service_reports_regime_errors(torus):
    assert run_prepare_service(torus, 4, 1, trials=2)['status'] == 'failed'
    with pytest.raises(ParameterError):
        run_prepare_service(torus, 3, 1, trials=0)


@pytest.mark.slow
@pytest.mark.parametrize('d', [3, 5])
def test_preparation_is_local_on_growing_tori(d):
    radii = {}
    for size in (2, 3):
        preparer = GroundStatePreparer(build_torus(size, size, size), d, 1)
        transcripts = [preparer.prepare(seed) for seed in range(100)]
        assert all(t.verified for t in transcripts)
        radii[size] = max(t.radius for t in transcripts)
        assert radii[size] <= preparer.block_size + 2
    assert radii[2] == radii[3]
