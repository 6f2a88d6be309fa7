"""Test CSV and JSON emission"""

import csv
import json

from tradeoff.graph.models import ComputationGraph, Edge, Operator, default_device_graph
from tradeoff.planner.bench import BenchRow
from tradeoff.planner.configs import build_config_space
from tradeoff.planner.costmodel import build_cost_tables
from tradeoff.planner.options import Choice, Infeasible
from tradeoff.planner.solver import ft
from tradeoff.utils import export
from tradeoff.utils.validation import validate_result_document


def _read_csv(path):
    with open(path, newline='') as f:
        return list(csv.DictReader(f))


class TestFrontierExport:
    """Test frontier files"""

    def test_csv_staircase(self, tmp_path, two_op_problem):
        """Test the frontier CSV of the two-operator problem"""
        g, tables = two_op_problem
        path = tmp_path / 'frontier.csv'
        export.write_frontier_csv(ft(g, None, tables), path)

        rows = _read_csv(path)
        assert list(rows[0]) == export.FRONTIER_COLUMNS
        assert [(r['memory_bytes'], r['time_s'], r['strategy_id']) for r in rows] == [
            ('2', '8', '0'), ('5', '3', '1')]
        assert rows[1]['comm_time_s'] == '0'
        assert rows[1]['compute_time_s'] == '3'

    def test_json_document(self, tmp_path, two_op_problem):
        """Test that emitted JSON re-parses and validates"""
        g, tables = two_op_problem
        path = tmp_path / 'frontier.json'
        export.write_result_json(ft(g, None, tables), path, tables)

        doc = json.loads(path.read_text())
        assert validate_result_document(doc) == []
        assert doc['frontier'][0]['strategy'] == [{'op': 0, 'config': 0}, {'op': 1, 'config': 0}]
        assert doc['stats']['frontier_size'] == 2
        assert doc['stats']['eliminations'] == {'node': 0, 'edge': 0, 'branch': 0, 'heuristic': 0}

    def test_json_with_configs(self):
        """Test that known configs add mesh and tensor maps"""
        shape = (8,)
        ops = [Operator(id=i, name=f"op{i}", tensor_shapes=(shape,)) for i in range(2)]
        g = ComputationGraph(ops, [Edge(id=0, src=0, dst=1, tensor_shape=shape)])
        dev = default_device_graph(2)
        tables = build_cost_tables(g, build_config_space(g, 2), dev)
        doc = export.result_document(ft(g, dev, tables), tables)

        assert validate_result_document(doc) == []
        entry = doc['frontier'][0]['strategy'][0]
        assert set(entry) == {'op', 'config', 'mesh', 'tensor_maps'}
        assert entry['mesh'] == [2]
        assert doc['stats']['device_count'] == 2

    def test_stdout(self, capsys, two_op_problem):
        """Test writing to standard output"""
        g, tables = two_op_problem
        export.write_frontier_csv(ft(g, None, tables), '-')
        out = capsys.readouterr().out
        assert out.splitlines()[0] == ','.join(export.FRONTIER_COLUMNS)


class TestOtherExports:
    """Test profile, benchmark, trace and choice files"""

    def test_profile_rows(self):
        """Test feasible and infeasible rows"""
        rows = export.profile_rows([(1, Infeasible("too big")), (2, Choice(10, 0.5, {0: 1}))])
        assert rows[0] == {'device_count': 1, 'status': 'infeasible', 'min_time_s': '', 'memory_bytes': ''}
        assert rows[1] == {'device_count': 2, 'status': 'ok', 'min_time_s': 0.5, 'memory_bytes': 10}

    def test_profile_json(self, tmp_path):
        """Test the profile JSON"""
        path = tmp_path / 'profile.json'
        export.write_profile_json([(4, Choice(10, 0.5, {0: 1}))], path)
        assert json.loads(path.read_text())['profile'][0]['status'] == 'ok'

    def test_bench_csv(self, tmp_path):
        """Test the benchmark table"""
        path = tmp_path / 'bench.csv'
        export.write_bench_csv([BenchRow(k=8, ldp_s=0.5, ft_elimination_s=1.5, frontier_size=4)], path)
        rows = _read_csv(path)
        assert rows[0]['k'] == '8'
        assert float(rows[0]['ratio']) == 3.0

    def test_trace(self, tmp_path):
        """Test the elimination log file"""
        path = tmp_path / 'sub' / 'trace.json'
        export.write_trace([{'kind': 'node'}], path)
        assert json.loads(path.read_text()) == [{'kind': 'node'}]

    def test_choice_csv(self, tmp_path):
        """Test a single choice as CSV"""
        path = tmp_path / 'choice.csv'
        export.write_choice(Choice(10, 0.5, {1: 2, 0: 1}), path, fmt='csv', device_count=4)
        rows = _read_csv(path)
        assert rows[0]['strategy'] == '0:1 1:2'
        assert rows[0]['device_count'] == '4'

    def test_choice_json(self, tmp_path):
        """Test a single choice as JSON"""
        path = tmp_path / 'choice.json'
        export.write_choice(Choice(10, 0.5, {0: 1}), path)
        doc = json.loads(path.read_text())
        assert doc == {'memory_bytes': 10, 'time_s': 0.5, 'strategy': [{'op': 0, 'config': 1}]}
