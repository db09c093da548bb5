import networkx as nx
import pytest

from chiralcc.codes import build_xyz, logical_class, logical_structure
from chiralcc.exceptions import ParameterError, UnsupportedError
from chiralcc.lattice import build_torus
from chiralcc.pauli import PauliOperator, multiply
from chiralcc.services.decoder_services import (NoiseModel, SingleShotDecoder, decode,
                                                repair_syndrome, run_decode_service,
                                                run_experiment, sample_trial, wilson_interval)
from chiralcc.topo import SyndromeConfig, check_metachecks, syndrome_of


# ==================== Noise ====================

def test_noise_model_validation():
    assert NoiseModel(0.01, 0.02, 3).to_dict() == {'p': 0.01, 'q': 0.02, 'seed': 3}
    with pytest.raises(ParameterError):
        NoiseModel(p=1.5)
    with pytest.raises(ParameterError):
        NoiseModel(q=-0.1)
    with pytest.raises(ParameterError):
        NoiseModel(seed=-1)


def test_sampling_is_seeded(xyz_torus):
    noise = NoiseModel(0.05, 0.05, 11)
    first_error, first_syndrome = sample_trial(xyz_torus, noise)
    second_error, second_syndrome = sample_trial(xyz_torus, noise)
    assert first_error == second_error
    assert (first_syndrome.values == second_syndrome.values).all()


def test_noiseless_sample_is_clean(xyz_torus):
    error, measured = sample_trial(xyz_torus, NoiseModel(0.0, 0.0, 4))
    assert error.is_identity()
    assert measured.is_zero()


# ==================== Syndrome Repair ====================

def test_single_flip_is_repaired(torus):
    for f in (0, 13, 200):
        measured = SyndromeConfig.from_faces(torus, 2, {f: 1})
        repaired = repair_syndrome(torus, measured)
        assert check_metachecks(torus, repaired).valid


def test_consistent_syndrome_is_left_alone(torus, xyz_torus, rng):
    error = PauliOperator(2, rng.integers(0, 2, torus.n), rng.integers(0, 2, torus.n))
    syndrome = syndrome_of(xyz_torus, error)
    assert repair_syndrome(torus, syndrome) is syndrome


def test_repair_is_qubit_only(torus):
    with pytest.raises(UnsupportedError):
        repair_syndrome(torus, SyndromeConfig.from_faces(torus, 3, {0: 1}))


# ==================== Decoding ====================

@pytest.mark.parametrize('x,z', [(1, 0), (0, 1), (1, 1)])
def test_single_site_errors_are_corrected(xyz_torus, x, z):
    structure = logical_structure(xyz_torus)
    for v in (0, 50, 191):
        error = PauliOperator.single_site(xyz_torus.n, 2, v, x=x, z=z)
        outcome = decode(xyz_torus, syndrome_of(xyz_torus, error))
        assert outcome.converged
        residual = multiply(outcome.correction, error)
        assert syndrome_of(xyz_torus, residual).is_zero()
        assert not logical_class(structure, residual).any()


def test_loop_wider_than_a_single_site_is_cleared_from_inside(xyz_torus, torus):
    graph = torus.vertex_graph
    candidates = []
    for f in torus.faces_of(0):
        for w in torus.faces[f].vertices:
            if nx.shortest_path_length(graph, 0, w) == 2:
                error = multiply(PauliOperator.single_site(xyz_torus.n, 2, 0, x=1, z=1),
                                 PauliOperator.single_site(xyz_torus.n, 2, w, x=1, z=1))
                candidates.append((syndrome_of(xyz_torus, error).weight, w, error))
    weight, _, error = max(candidates, key=lambda item: item[:2])
    assert weight >= 6
    outcome = decode(xyz_torus, syndrome_of(xyz_torus, error))
    assert outcome.converged
    assert outcome.fermion_pairs == ()
    residual = multiply(outcome.correction, error)
    assert syndrome_of(xyz_torus, residual).is_zero()
    assert not logical_class(logical_structure(xyz_torus), residual).any()


def test_residual_weight_counts_the_residual_operator(xyz_torus):
    stabilizer = xyz_torus.generators[0]
    decoder = SingleShotDecoder(xyz_torus)
    record = decoder.record_trial(stabilizer, syndrome_of(xyz_torus, stabilizer))
    assert record.success
    assert syndrome_of(xyz_torus, record.residual).weight == 0
    assert record.residual_weight == stabilizer.weight > 0


def test_decoder_needs_qubits(chiral3_torus):
    with pytest.raises(UnsupportedError):
        SingleShotDecoder(chiral3_torus)


def test_zero_noise_never_fails(xyz_torus):
    summary = run_experiment(xyz_torus, NoiseModel(0.0, 0.0, 1), trials=10, threads=2)
    assert summary.failures == 0
    assert summary.max_residual_weight == 0
    assert summary.histogram == {0: 10}


def test_results_do_not_depend_on_thread_count(xyz_torus):
    noise = NoiseModel(0.01, 0.01, 5)
    serial = run_experiment(xyz_torus, noise, trials=12, threads=1)
    parallel = run_experiment(xyz_torus, noise, trials=12, threads=4)
    assert serial.failures == parallel.failures
    assert [r.to_dict() for r in serial.records] == [r.to_dict() for r in parallel.records]


def test_trial_record_document(xyz_torus):
    summary = run_experiment(xyz_torus, NoiseModel(0.02, 0.0, 9), trials=2, threads=1)
    document = summary.records[1].to_dict()
    assert document['trial'] == 1
    assert set(document) == {'trial', 'error', 'true_syndrome', 'measured_syndrome',
                             'repaired_syndrome', 'correction', 'residual', 'residual_weight',
                             'success', 'logical'}
    assert set(summary.to_dict()) >= {'trials', 'failures', 'ci_low', 'ci_high'}


def test_experiment_needs_trials(xyz_torus):
    with pytest.raises(ParameterError):
        run_experiment(xyz_torus, NoiseModel(), trials=0)


# ==================== Statistics ====================

def test_wilson_interval():
    assert wilson_interval(0, 0) == (0.0, 1.0)
    low, high = wilson_interval(0, 100)
    assert low == pytest.approx(0.0, abs=1e-12)
    assert 0.03 < high < 0.04
    low, high = wilson_interval(50, 100)
    assert low + high == pytest.approx(1.0)
    assert low < 0.5 < high


# ==================== Service ====================

def test_decode_service_reports_failure_for_qudits(chiral3_torus):
    result = run_decode_service(chiral3_torus, NoiseModel(), trials=3)
    assert result['status'] == 'failed'


def test_decode_service_success(xyz_torus):
    result = run_decode_service(xyz_torus, NoiseModel(0.0, 0.0, 2), trials=3, threads=1)
    assert result['status'] == 'success'
    assert result['summary'].trials == 3
    assert len(result['records']) == 3


@pytest.mark.slow
def test_larger_torus_does_not_fail_more_often(xyz_torus):
    noise = NoiseModel(0.001, 0.001, 2024)
    small = run_experiment(xyz_torus, noise, trials=10000)
    large = run_experiment(build_xyz(build_torus(3, 3, 3)), noise, trials=10000)
    assert large.ci_low <= small.ci_high
    assert small.max_residual_weight <= 12
    assert large.max_residual_weight <= 12
