import json

import numpy as np
import pytest

from aggregation import MAX, MIN, AggregatorKind
from community import Partition
from errors import InputError
from fuzzy_measure import AdditiveMeasure, ExplicitMeasure
from matrix_io import (
    matrix_summary, read_bipolar_measure, read_matrix, read_measure, read_partition,
    read_pipeline_config, write_matrix, write_partition, write_partition_csv
)
from weighted_graph import WeightedGraph


def write_json(path, payload):
    path.write_text(json.dumps(payload))
    return path


class TestMatrices:
    """Test matrix files"""

    def test_example_matrix(self, example_dir):
        A = read_matrix(example_dir / "A.csv")
        assert A.n == 8
        assert A.total_weight == 18.0

    def test_declared_size_header(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("2\n0,1\n1,0\n")
        assert np.array_equal(read_matrix(path).weights, [[0.0, 1.0], [1.0, 0.0]])

    def test_declared_size_mismatch(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("3\n0,1\n1,0\n")
        with pytest.raises(InputError):
            read_matrix(path)

    def test_expected_size(self, example_dir):
        with pytest.raises(InputError):
            read_matrix(example_dir / "A.csv", n=7)

    def test_ragged_rows(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("0,1\n1\n")
        with pytest.raises(InputError):
            read_matrix(path)

    def test_asymmetric(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("0,1\n0,0\n")
        with pytest.raises(InputError):
            read_matrix(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputError):
            read_matrix(tmp_path / "absent.csv")

    def test_edge_list(self, tmp_path):
        path = tmp_path / "g.tsv"
        path.write_text("# i j w\n1\t2\t0.5\n2\t3\t1\n")
        graph = read_matrix(path, n=4)
        assert graph.n == 4
        assert graph.weights[0, 1] == graph.weights[1, 0] == 0.5
        assert graph.weights[2, 1] == 1.0

    def test_edge_list_default_weight(self, tmp_path):
        path = tmp_path / "g.edges"
        path.write_text("1\t3\n")
        graph = read_matrix(path)
        assert graph.n == 3
        assert graph.weights[2, 0] == 1.0

    def test_edge_list_node_out_of_range(self, tmp_path):
        path = tmp_path / "g.tsv"
        path.write_text("1\t5\n")
        with pytest.raises(InputError):
            read_matrix(path, n=4)

    def test_write_read(self, tmp_path):
        rng = np.random.default_rng(0)
        w = rng.random((5, 5))
        matrix = WeightedGraph((w + w.T) / 2)
        write_matrix(tmp_path / "m.csv", matrix)
        assert np.array_equal(read_matrix(tmp_path / "m.csv").weights, matrix.weights)

    def test_summary(self):
        summary = matrix_summary(WeightedGraph.from_edges(3, [(0, 1)]))
        assert summary.max == 1.0
        assert summary.density == pytest.approx(2 / 6)


class TestMeasureFiles:
    """Test measure documents"""

    def test_explicit(self, tmp_path):
        path = write_json(tmp_path / "m.json", {
            "n": 2,
            "values": [
                {"subset": [], "value": 0.0},
                {"subset": [1], "value": 0.3},
                {"subset": [2], "value": 0.5},
                {"subset": [1, 2], "value": 1.0}
            ]
        })
        measure = read_measure(path)
        assert isinstance(measure, ExplicitMeasure)
        assert measure.value(0b01) == 0.3

    def test_missing_entries_become_nan(self, tmp_path):
        path = write_json(tmp_path / "m.json", {"n": 2, "values": [{"subset": [1, 2], "value": 1.0}]})
        assert np.isnan(read_measure(path).value(0b10))

    def test_additive(self, tmp_path):
        path = write_json(tmp_path / "m.json", {"n": 3, "form": "additive", "weights": [0.2, 0.3, 0.5]})
        measure = read_measure(path)
        assert isinstance(measure, AdditiveMeasure)
        assert measure.n == 3

    @pytest.mark.parametrize("payload", [
        {"n": 2},
        {"n": 2, "values": [{"subset": [3], "value": 0.1}]},
        {"n": 2, "form": "additive", "weights": [1.0]},
        {"n": 0, "form": "additive", "weights": []},
    ])
    def test_invalid(self, tmp_path, payload):
        with pytest.raises(InputError):
            read_measure(write_json(tmp_path / "m.json", payload))

    def test_bipolar(self, tmp_path):
        additive = {"n": 2, "form": "additive", "weights": [0.5, 0.5]}
        path = write_json(tmp_path / "b.json", {"negative": additive, "positive": additive})
        assert read_bipolar_measure(path).n == 2

    def test_bipolar_size_mismatch(self, tmp_path):
        path = write_json(tmp_path / "b.json", {
            "negative": {"n": 2, "form": "additive", "weights": [0.5, 0.5]},
            "positive": {"n": 1, "form": "additive", "weights": [1.0]},
        })
        with pytest.raises(InputError):
            read_bipolar_measure(path)


class TestPartitionFiles:
    """Test partition documents"""

    def test_json_is_one_based(self, tmp_path):
        path = tmp_path / "p.json"
        write_partition(path, Partition([0, 0, 1]))
        document = json.loads(path.read_text())
        assert document == {"n": 3, "communities": [[1, 2], [3]]}
        assert read_partition(path) == Partition([0, 0, 1])

    def test_csv(self, tmp_path):
        path = tmp_path / "p.csv"
        write_partition_csv(path, Partition([1, 0, 1, 2]))
        assert path.read_text().splitlines()[0] == "node,label"
        assert read_partition(path) == Partition([0, 1, 0, 2])

    def test_csv_missing_node(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("node,label\n1,0\n3,1\n")
        with pytest.raises(InputError):
            read_partition(path)

    def test_csv_non_integer_labels(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("node,label\n1,a\n2,b\n")
        with pytest.raises(InputError):
            read_partition(path)

    def test_overlapping_communities(self, tmp_path):

        path = write_json(tmp_path / "p.json", {"n": 3, "communities": [[1, 2], [2, 3]]})
        with pytest.raises(InputError):
            read_partition(path)

    def test_empty_community(self, tmp_path):
        path = write_json(tmp_path / "p.json", {"n": 2, "communities": [[1, 2], []]})
        with pytest.raises(InputError):
            read_partition(path)


class TestPipelineConfigFile:
    """Test pipeline configuration documents"""

    def test_example_config(self, example_dir):
        cfg = read_pipeline_config(example_dir / "config.json")
        assert cfg.phi_neg == (MAX, MAX)
        assert cfg.multi_pos == MAX
        assert cfg.psi == MIN
        assert cfg.gamma == 0.5

    def test_shorthand(self, tmp_path):
        path = write_json(tmp_path / "c.json", {
            "phi_neg": "mean", "phi_pos": "owa:0.5,0.5", "multi_neg": "min", "psi": "max", "gamma": 0.2
        })
        cfg = read_pipeline_config(path)
        assert cfg.phi_neg[0].kind == AggregatorKind.MEAN
        assert cfg.phi_pos[0].weights == (0.5, 0.5)
        assert cfg.multi_neg == MIN
        assert cfg.multi_pos == MAX
        assert cfg.gamma == 0.2

    @pytest.mark.parametrize("payload", [
        {"gamma": 1.5},
        {"psi": "median"},
        {"negation": "sugeno"},
        {"phi_neg": ["max", "max"], "phi_pos": ["max"]},
        {"psi": "owa:0.9,0.9"},
    ])
    def test_invalid(self, tmp_path, payload):
        with pytest.raises(InputError):
            read_pipeline_config(write_json(tmp_path / "c.json", payload))


if __name__ == "__main__":
    pytest.main([__file__, "-v", "--cov=matrix_io", "--cov-report=html"])
