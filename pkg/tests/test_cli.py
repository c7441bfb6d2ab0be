"""Command-line entry point: exit codes, output records and configuration layering."""

import csv
import io
import json
import math

import pytest

from orlicz_eig import ExperimentConfig, build_parser, build_config, main, read_config_file
from errors import SpecParseError


def run(capsys, *args):
    code = main(list(args) + ['--no-log-file'])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestExitCodes:

    def test_validate_young(self, capsys):
        code, out, _ = run(capsys, 'validate-young', '--young', 'power:2', '--samples', '2000')
        assert code == 0
        record = json.loads(out)
        assert record['schema_version'] == '1'
        assert record['result']['p_minus'] == 2.0
        assert record['result']['passed'] is True

    @pytest.mark.parametrize("young", ['power:0.9', 'powersum:2,1', 'exp:2'])
    def test_bad_young_spec(self, capsys, young):
        code, _, err = run(capsys, 'validate-young', '--young', young)
        assert code == 2
        assert 'Error' in err

    def test_inadmissible_order(self, capsys):
        code, _, _ = run(capsys, 'eig', '--young', 'power:1.5', '--s', '1', '--n', '16')
        assert code == 2

    def test_oracle_needs_quadratic(self, capsys):
        code, _, _ = run(capsys, 'oracle-p2', '--young', 'power:3', '--n', '16')
        assert code == 2

    def test_bad_domain(self, capsys):
        code, _, _ = run(capsys, 'eig', '--domain', '1,0', '--n', '16')
        assert code == 2


class TestCommands:

    def test_eig_local_quadratic(self, capsys):
        code, out, _ = run(capsys, 'eig', '--young', 'power:2', '--s', '1', '--n', '64')
        assert code == 0
        result = json.loads(out)['result']
        assert result['converged'] is True
        assert result['lambda'] == pytest.approx(math.pi, rel=2e-3)

    def test_oracle_is_deterministic(self, capsys):
        args = ('oracle-p2', '--young', 'power:2', '--s', '0.5', '--n', '16')
        _, first, _ = run(capsys, *args)
        _, second, _ = run(capsys, *args)
        assert first == second
        assert json.loads(first)['result']['lambda_2'] > json.loads(first)['result']['lambda_1']

    def test_barg_csv(self, capsys):
        code, out, _ = run(capsys, 'barg', '--young', 'power:3', '--csv')
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 61
        for row in rows:
            assert float(row['G_bar']) == pytest.approx(2.0 / 3.0 * float(row['G']), rel=1e-8)

    def test_sweep_single_order(self, capsys):
        code, out, _ = run(capsys, 'sweep', '--young', 'power:2', '--s-list', '0.5', '--n', '16')
        assert code == 0
        result = json.loads(out)['result']
        assert result['gap'] is None
        assert result['lambdas'][0] > 0

    def test_sweep_reports_unconverged_orders(self, capsys):
        code, out, _ = run(capsys, 'sweep', '--young', 'power:3', '--s-list', '0.5', '--n', '16',
                           '--max-iters', '1')
        assert code == 1
        result = json.loads(out)['result']
        assert '0.5' in result['failures']
        assert result['lambdas'] == []

    def test_out_writes_record_and_table(self, capsys, tmp_path):
        base = tmp_path / 'run'
        code, out, _ = run(capsys, 'eig', '--young', 'power:2', '--s', '1', '--n', '16',
                           '--out', str(base))
        assert code == 0
        record = json.loads((tmp_path / 'run.json').read_text())
        assert record['command'] == 'eig'
        assert 'out' not in record['config']
        rows = list(csv.DictReader(io.StringIO((tmp_path / 'run.csv').read_text())))
        assert len(rows) == 17
        assert float(rows[0]['u']) == 0.0
        assert 'SUMMARY' in out

    def test_props_single_family(self, capsys):
        code, out, _ = run(capsys, 'props', '--young', 'power:3', '--s', '0.5', '--n', '8',
                           '--samples', '2000')
        record = json.loads(out)
        assert code == 0, [c for c in record['result']['checks'] if not c['passed']]
        assert record['result']['passed'] is True


class TestConfiguration:

    def test_file_values_and_flag_overrides(self, tmp_path):
        path = tmp_path / 'experiment.cfg'
        path.write_text("# quadratic run\nyoung = power:3\nn = 32\ns-list = 0.5, 0.9\n")
        args = build_parser().parse_args(['eig', '--config', str(path), '--n', '16'])
        cfg = build_config(args)
        assert cfg.young == 'power:3'
        assert cfg.n == 16
        assert cfg.s_list == (0.5, 0.9)

    def test_unknown_key(self, tmp_path):
        path = tmp_path / 'bad.cfg'
        path.write_text("colour = blue\n")
        args = build_parser().parse_args(['eig', '--config', str(path)])
        with pytest.raises(SpecParseError):
            build_config(args)

    def test_line_without_equals(self, tmp_path):
        path = tmp_path / 'bad.cfg'
        path.write_text("young power:2\n")
        with pytest.raises(SpecParseError):
            read_config_file(path)

    def test_resolved_record_is_complete(self):
        resolved = ExperimentConfig(command='eig').resolved()
        assert resolved['domain'] == [0.0, 1.0]
        assert 'seed' in resolved and 'gauss_order' in resolved
