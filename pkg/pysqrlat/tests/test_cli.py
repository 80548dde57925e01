# coding=utf-8
import csv
import json

import pytest


@pytest.fixture
def cli():
    from pysqrlat import cli

    return cli


def run(cli, capsys, *argv):
    code = cli.dispatch(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_field_reports_invariants(cli, capsys):
    code, out, _ = run(cli, capsys, 'field', '--quadratic', '8')
    report = json.loads(out)

    assert code == cli.EXIT_OK
    assert report['degree'] == 2
    assert report['discriminant'] == 8
    assert 'fundamental_unit' in report
    assert report['run_config']['command'] == 'field'


def test_invalid_discriminant_exits_with_json_error(cli, capsys):
    code, out, err = run(cli, capsys, 'field', '--quadratic', '9')

    assert code == cli.EXIT_INVALID
    assert out == ''
    assert json.loads(err)['error'] == 'NotFundamentalError'


def test_missing_field_is_invalid_input(cli, capsys):
    code, _, err = run(cli, capsys, 'relation')

    assert code == cli.EXIT_INVALID
    assert json.loads(err)['error'] == 'InvalidInputError'


def test_bad_precision_environment_is_invalid_input(cli, capsys, monkeypatch):
    monkeypatch.setenv('SQRLAT_PRECISION', 'many')

    code, _, err = run(cli, capsys, 'field', '--quadratic', '8')

    assert code == cli.EXIT_INVALID
    assert 'SQRLAT_PRECISION' in json.loads(err)['message']


def test_unknown_command_is_rejected(cli, capsys):
    code, out, err = run(cli, capsys, 'frobnicate')

    assert code == cli.EXIT_INVALID
    assert out == ''
    assert json.loads(err)['error'] == 'InvalidInputError'


def test_malformed_flag_value_is_invalid_input(cli, capsys):
    code, _, err = run(cli, capsys, 'points', '--quadratic', 'eight')

    assert code == cli.EXIT_INVALID
    assert '--quadratic' in json.loads(err)['message']


def test_unwritable_csv_output_is_invalid_input(cli, capsys, tmp_path):
    path = tmp_path / 'missing' / 'points.csv'

    code, _, err = run(cli, capsys, 'points', '--quadratic', '5', '--m-max', '1', '--out', str(path))

    assert code == cli.EXIT_INVALID
    assert json.loads(err)['error'] == 'FileNotFoundError'


def test_unwritable_report_output_is_invalid_input(cli, capsys, tmp_path):
    path = tmp_path / 'missing' / 'commutators.json'

    code, _, err = run(cli, capsys, 'commutators', '--k-max', '2', '--out', str(path))

    assert code == cli.EXIT_INVALID
    assert json.loads(err)['error'] == 'FileNotFoundError'


def test_unwritable_run_config_is_invalid_input(cli, capsys, tmp_path):
    path = tmp_path / 'missing' / 'run.json'

    code, _, err = run(cli, capsys, '--run-config', str(path), 'field', '--quadratic', '5')

    assert code == cli.EXIT_INVALID
    assert json.loads(err)['error'] == 'FileNotFoundError'


def test_relation_is_found(cli, capsys):
    code, out, _ = run(cli, capsys, 'relation', '--quadratic', '8')

    assert code == cli.EXIT_OK
    assert json.loads(out)['relation_found'] is True


def test_points_csv(cli, capsys, tmp_path):
    path = tmp_path / 'points.csv'

    code, out, _ = run(cli, capsys, 'points', '--quadratic', '8', '--m-max', '4', '--out', str(path))

    with open(str(path)) as handle:
        rows = list(csv.reader(handle))
    assert code == cli.EXIT_OK
    assert rows[0] == ['m', 'x1', 'x2']
    assert len(rows) - 1 == json.loads(out)['points']


def test_run_config_is_written(cli, capsys, tmp_path):
    path = tmp_path / 'run.json'

    code, _, _ = run(cli, capsys, '--seed', '7', '--run-config', str(path), 'field', '--quadratic', '5')

    with open(str(path)) as handle:
        config = json.load(handle)
    assert code == cli.EXIT_OK
    assert config['command'] == 'field'
    assert config['seed'] == 7
    assert config['arguments']['quadratic'] == 5
    assert config['config']['threads'] == 1


def test_relation_search_finds_nothing_for_wide_lattice(cli, capsys):
    code, out, _ = run(cli, capsys, 'probe', '--lambda', '3', '--depth', '4')

    assert code == cli.EXIT_OK
    assert json.loads(out)['relation_found'] is None


def test_commutators_default_to_integer_lattice(cli, capsys):
    code, out, _ = run(cli, capsys, 'commutators', '--k-max', '5')
    report = json.loads(out)

    assert code == cli.EXIT_OK
    assert [row['k'] for row in report['commutators']] == [1, 2, 3, 4, 5]
    assert report['property_I'] == [False, False]


def test_lemma_check_passes(cli, capsys):
    code, out, _ = run(cli, capsys, 'lemma51', '--N', '2', '--B', '2', '--lambdas', '2,3')
    report = json.loads(out)

    assert code == cli.EXIT_OK
    assert report['passed']
    assert all(p['passed'] for p in report['pingpong'])


def test_lemma_check_rejects_small_lambda(cli, capsys):
    code, _, err = run(cli, capsys, 'lemma51', '--N', '2', '--B', '2', '--lambdas', '1.8')

    assert code == cli.EXIT_INVALID
    assert json.loads(err)['error'] == 'PreconditionError'


def test_coefficients_csv(cli, capsys, tmp_path):
    path = tmp_path / 'coeffs.csv'

    code, _, _ = run(
        cli, capsys,
        'coeffs', '--threshold', '1e4', '--tolerance', '1e-6', '--n-min', '1', '--n-max', '3',
        '--radii', '0.5,1', '--out', str(path),
    )

    with open(str(path)) as handle:
        rows = list(csv.reader(handle))
    assert code == cli.EXIT_OK
    assert rows[0] == ['n', 'r', 're_a', 'im_a', 're_atilde', 'im_atilde']
    assert len(rows) == 1 + 3 * 2


def test_interpolation_command(cli, capsys, tmp_path):
    path = tmp_path / 'interp.json'

    code, _, _ = run(
        cli, capsys,
        'interp', '--d', '12', '--threshold', '1e5', '--tolerance', '1e-6',
        '--tau', '0.1,1', '--radii', '0.3,0.9', '--nmax', '12', '--out', str(path),
    )

    with open(str(path)) as handle:
        report = json.load(handle)
    assert code == cli.EXIT_OK
    assert report['passed']
    assert report['max_residual'] < 1e-4


@pytest.mark.slow
def test_sphere_construction_command(cli, capsys):
    code, out, _ = run(cli, capsys, 'nonuniq', '--quadratic', '8', '--eps', '-1', '--verify-level', '40')
    report = json.loads(out)

    assert code == cli.EXIT_OK
    assert report['passed']
    assert len(report['function']['terms']) == 16
