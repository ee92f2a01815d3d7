import json

import pytest
from click.testing import CliRunner

from cli import cli


def last_json(output: str) -> dict:
    return json.loads(output.strip().splitlines()[-1])


def example_args(example_dir):
    return [
        '--graph', str(example_dir / 'A.csv'),
        '--f-minus', str(example_dir / 'Fminus1.csv'),
        '--f-minus', str(example_dir / 'Fminus2.csv'),
        '--f-plus', str(example_dir / 'Fplus1.csv'),
        '--f-plus', str(example_dir / 'Fplus2.csv'),
        '--pipeline', str(example_dir / 'config.json'),
    ]


def additive_measure(n: int) -> dict:
    return {"n": n, "form": "additive", "weights": [1.0 / n] * n}


@pytest.fixture
def runner():
    return CliRunner()


class TestDetect:
    """Test the detect command"""

    def test_example_bundle(self, runner, example_dir, tmp_path):
        out = tmp_path / 'partition.json'
        result = runner.invoke(cli, ['detect', *example_args(example_dir), '--out', str(out)])
        assert result.exit_code == 0, result.output
        document = json.loads(out.read_text())
        assert document['communities'] == [[1, 2], [3, 4], [5, 6], [7, 8]]

        report = json.loads((tmp_path / 'partition_report.json').read_text())
        assert report['algorithm'] == 'multiple_bipolar_duo_louvain'
        assert report['gamma'] == 0.5
        assert report['group_notion'] == {
            'multi_neg': 'disjunctive', 'multi_pos': 'disjunctive', 'psi': 'conjunctive'
        }
        assert set(report['matrices']) == {'A', 'F_minus', 'F_plus', 'F_b', 'M'}

    def test_gamma_one(self, runner, example_dir, tmp_path):
        out = tmp_path / 'partition.json'
        result = runner.invoke(cli, [
            'detect', *example_args(example_dir), '--gamma', '1', '--out', str(out)
        ])
        assert result.exit_code == 0, result.output
        assert json.loads(out.read_text())['communities'] == [[1, 2, 3, 4], [5, 6, 7, 8]]

    def test_plain_louvain(self, runner, example_dir, tmp_path):
        out = tmp_path / 'partition.json'
        report = tmp_path / 'run.json'
        result = runner.invoke(cli, [
            'detect', '--graph', str(example_dir / 'A.csv'), '--out', str(out),
            '--report', str(report), '--partition-csv', str(tmp_path / 'partition.csv')
        ])
        assert result.exit_code == 0, result.output
        assert json.loads(report.read_text())['algorithm'] == 'louvain'
        assert (tmp_path / 'partition.csv').read_text().startswith('node,label')
        assert 'Modularity' in result.output

    def test_measures(self, runner, example_dir, tmp_path):
        measure = tmp_path / 'measure.json'
        measure.write_text(json.dumps({"negative": additive_measure(8), "positive": additive_measure(8)}))
        out = tmp_path / 'partition.json'
        result = runner.invoke(cli, [
            'detect', '--graph', str(example_dir / 'A.csv'), '--measures', str(measure),
            '--out', str(out)
        ])
        assert result.exit_code == 0, result.output
        assert json.loads(out.read_text())['n'] == 8

    def test_measures_and_matrices_conflict(self, runner, example_dir, tmp_path):
        measure = tmp_path / 'measure.json'
        measure.write_text(json.dumps({"negative": additive_measure(8), "positive": additive_measure(8)}))
        result = runner.invoke(cli, [
            'detect', *example_args(example_dir), '--measures', str(measure),
            '--out', str(tmp_path / 'p.json')
        ])
        assert result.exit_code == 2
        assert '"error_type":"input"' in result.output

    def test_missing_matrix_file(self, runner, tmp_path):
        result = runner.invoke(cli, [
            'detect', '--graph', str(tmp_path / 'absent.csv'), '--out', str(tmp_path / 'p.json')
        ])
        assert result.exit_code == 2
        assert '"error_type":"input"' in result.output

    def test_dimension_mismatch(self, runner, example_dir, tmp_path):
        small = tmp_path / 'small.csv'
        small.write_text('0,1\n1,0\n')
        result = runner.invoke(cli, [
            'detect', '--graph', str(example_dir / 'A.csv'),
            '--f-minus', str(small), '--f-plus', str(small), '--out', str(tmp_path / 'p.json')
        ])
        assert result.exit_code == 2

    def test_zero_weight_graph(self, runner, tmp_path):
        empty = tmp_path / 'empty.csv'
        empty.write_text('0,0\n0,0\n')
        result = runner.invoke(cli, ['detect', '--graph', str(empty), '--out', str(tmp_path / 'p.json')])
        assert result.exit_code == 3
        assert '"error_type":"numeric"' in result.output

    def test_invalid_operator(self, runner, example_dir, tmp_path):
        result = runner.invoke(cli, [
            'detect', *example_args(example_dir), '--psi', 'median', '--out', str(tmp_path / 'p.json')
        ])
        assert result.exit_code == 2

    def test_metrics_file(self, runner, example_dir, tmp_path):
        metrics = tmp_path / 'metrics.prom'
        result = runner.invoke(cli, [
            '--metrics-file', str(metrics), 'detect', '--graph', str(example_dir / 'A.csv'),
            '--out', str(tmp_path / 'p.json')
        ])
        assert result.exit_code == 0, result.output
        assert 'detection_runs_total' in metrics.read_text()


class TestGenerate:
    """Test the generate command"""

    def test_files(self, runner, tmp_path):
        out = tmp_path / 'instance'
        result = runner.invoke(cli, ['generate', '--case', '1', '--label', '1', '--seed', '7', '--out', str(out)])
        assert result.exit_code == 0, result.output
        for name in ('A.csv', 'Fminus.csv', 'Fplus.csv', 'gold.json', 'manifest.json'):
            assert (out / name).exists()
        manifest = json.loads((out / 'manifest.json').read_text())
        assert manifest['seed'] == 7
        assert manifest['alpha'] == 0.45

    def test_case_four_gold(self, runner, tmp_path):
        out = tmp_path / 'instance'
        result = runner.invoke(cli, ['generate', '--case', '4', '--label', '3', '--out', str(out)])
        assert result.exit_code == 0, result.output
        gold = json.loads((out / 'gold.json').read_text())
        assert [len(c) for c in gold['communities']] == [40, 24, 64, 21, 22, 21, 32, 32]

    def test_byte_identical(self, runner, tmp_path):
        for name in ('first', 'second'):
            result = runner.invoke(cli, [
                'generate', '--case', '2', '--label', '5', '--seed', '3', '--out', str(tmp_path / name)
            ])
            assert result.exit_code == 0, result.output
        for name in ('A.csv', 'Fminus.csv', 'Fplus.csv', 'gold.json', 'manifest.json'):
            assert (tmp_path / 'first' / name).read_bytes() == (tmp_path / 'second' / name).read_bytes()

    def test_invalid_label(self, runner, tmp_path):
        result = runner.invoke(cli, ['generate', '--case', '1', '--label', '12', '--out', str(tmp_path)])
        assert result.exit_code == 2


class TestEvaluate:
    """Test the evaluate command"""

    @pytest.fixture
    def partitions(self, tmp_path):
        x = tmp_path / 'x.json'
        y = tmp_path / 'y.json'
        x.write_text(json.dumps({"n": 4, "communities": [[1, 2], [3, 4]]}))
        y.write_text(json.dumps({"n": 4, "communities": [[1, 2, 3], [4]]}))
        return x, y

    def test_nmi(self, runner, partitions):
        x, y = partitions
        result = runner.invoke(cli, ['evaluate', str(x), str(y)])
        assert result.exit_code == 0, result.output
        assert last_json(result.output)['nmi'] == pytest.approx(0.3437, abs=1e-4)

    def test_details(self, runner, partitions, tmp_path):
        x, y = partitions
        out = tmp_path / 'nmi.json'
        result = runner.invoke(cli, ['evaluate', str(x), str(y), '--details', '--out', str(out)])
        assert result.exit_code == 0, result.output
        report = json.loads(out.read_text())
        assert report['mutual_information'] == pytest.approx(0.2158, abs=1e-4)
        assert report['entropy_y'] == pytest.approx(0.5623, abs=1e-4)

    def test_identical(self, runner, partitions):
        x, _ = partitions
        result = runner.invoke(cli, ['evaluate', str(x), str(x)])
        assert last_json(result.output) == {"nmi": 1.0}

    def test_size_mismatch(self, runner, partitions, tmp_path):
        x, _ = partitions
        z = tmp_path / 'z.json'
        z.write_text(json.dumps({"n": 3, "communities": [[1, 2, 3]]}))
        result = runner.invoke(cli, ['evaluate', str(x), str(z)])
        assert result.exit_code == 2

    def test_non_integer_csv_labels(self, runner, partitions, tmp_path):
        x, _ = partitions
        z = tmp_path / 'z.csv'
        z.write_text("node,label\n1,a\n2,a\n3,b\n4,b\n")
        result = runner.invoke(cli, ['evaluate', str(x), str(z)])
        assert result.exit_code == 2
        assert '"error_type":"input"' in result.output


class TestReproduce:
    """Test the reproduce command"""

    def test_configuration_file(self, runner, tmp_path):
        config_file = tmp_path / 'config.yaml'
        config_file.write_text("reproduce:\n  iterations: 1\n  gammas: [0.0, 1.0]\n")
        out = tmp_path / 'table.csv'
        result = runner.invoke(cli, [
            '--config', str(config_file), 'reproduce', '--case', '1',
            '--graph-labels', '1', '--relations-labels', '1', '--out', str(out)
        ])
        assert result.exit_code == 0, result.output
        assert (tmp_path / 'table_gamma0.csv').exists()
        assert (tmp_path / 'table_gamma1.csv').exists()
        assert "Cells: 2 completed, 0 failed" in result.output

    def test_single_cell(self, runner, tmp_path):
        out = tmp_path / 'table.csv'
        result = runner.invoke(cli, [
            'reproduce', '--case', '1', '--gamma', '0', '--iterations', '1',
            '--graph-labels', '1', '--relations-labels', '1,2', '--out', str(out)
        ])
        assert result.exit_code == 0, result.output
        lines = out.read_text().splitlines()
        assert lines[0] == 'graph,1,2'
        assert len(lines) == 2
        assert 'Cells: 2 completed, 0 failed' in result.output

    def test_gamma_sweep(self, runner, tmp_path):
        out = tmp_path / 'table.csv'
        result = runner.invoke(cli, [
            'reproduce', '--case', '1', '--gamma', '0', '--gamma', '1', '--iterations', '1',
            '--graph-labels', '2', '--relations-labels', '2', '--Phi', 'max', '--out', str(out)
        ])
        assert result.exit_code == 0, result.output
        assert (tmp_path / 'table_gamma0.csv').exists()
        assert (tmp_path / 'table_gamma1.csv').exists()

    def test_invalid_gamma(self, runner, tmp_path):
        result = runner.invoke(cli, [
            'reproduce', '--case', '1', '--gamma', '1.5', '--out', str(tmp_path / 't.csv')
        ])
        assert result.exit_code == 2

    def test_invalid_labels(self, runner, tmp_path):
        result = runner.invoke(cli, [
            'reproduce', '--case', '1', '--graph-labels', '1,x', '--out', str(tmp_path / 't.csv')
        ])
        assert result.exit_code == 2


class TestMeasureCommands:
    """Test validate-measure and shapley"""

    @pytest.fixture
    def three_player(self, tmp_path):
        path = tmp_path / 'measure.json'
        path.write_text(json.dumps({"n": 3, "values": [
            {"subset": [], "value": 0.0}, {"subset": [1], "value": 0.1},
            {"subset": [2], "value": 0.2}, {"subset": [3], "value": 0.3},
            {"subset": [1, 2], "value": 0.5}, {"subset": [1, 3], "value": 0.5},
            {"subset": [2, 3], "value": 0.6}, {"subset": [1, 2, 3], "value": 1.0}
        ]}))
        return path

    def test_valid_measure(self, runner, three_player):
        result = runner.invoke(cli, ['validate-measure', str(three_player)])
        assert result.exit_code == 0, result.output
        assert 'valid fuzzy measure' in result.output

    def test_invalid_measure(self, runner, tmp_path):
        path = tmp_path / 'bad.json'
        path.write_text(json.dumps({"n": 2, "values": [
            {"subset": [], "value": 0.0}, {"subset": [1], "value": 0.9},
            {"subset": [2], "value": 0.3}, {"subset": [1, 2], "value": 0.8}
        ]}))
        result = runner.invoke(cli, ['validate-measure', str(path)])
        assert result.exit_code == 2
        assert 'monotonicity' in result.output

    def test_bipolar_measure(self, runner, tmp_path):
        path = tmp_path / 'bipolar.json'
        path.write_text(json.dumps({"negative": additive_measure(3), "positive": additive_measure(3)}))
        result = runner.invoke(cli, ['validate-measure', '--bipolar', str(path)])
        assert result.exit_code == 0, result.output

    def test_shapley_json(self, runner, three_player):
        result = runner.invoke(cli, ['shapley', str(three_player), '--format', 'json'])
        assert result.exit_code == 0, result.output
        values = json.loads(result.output[result.output.index('{'):])['values']
        assert values == pytest.approx([0.25, 0.35, 0.40], abs=1e-12)

    def test_shapley_sampled_table(self, runner, three_player):
        result = runner.invoke(cli, ['shapley', str(three_player), '--method', 'sampled', '--samples', '500'])
        assert result.exit_code == 0, result.output
        assert 'Std. error' in result.output


if __name__ == "__main__":
    pytest.main([__file__, "-v", "--cov=cli", "--cov-report=html"])
