"""Tests for the command line surface and its exit codes"""

import numpy as np
import pytest

from rlplab.main import main
from rlplab.schemas import Signal
from rlplab.utils.codecs import read_signal, read_sparse, write_signal


def _lines(capsys):
    return capsys.readouterr().out.strip().splitlines()


def _values(lines):
    return dict(line.split(",", 1) for line in lines if "," in line)


@pytest.fixture
def signal_file(tmp_path, rng):
    path = str(tmp_path / "f.txt")
    write_signal(path, Signal(samples=rng.standard_normal(64) + 1j * rng.standard_normal(64)))
    return path


@pytest.fixture
def spike_file(tmp_path):
    samples = np.zeros(64)
    samples[21] = 64.0
    path = str(tmp_path / "spike.txt")
    write_signal(path, Signal(samples=samples))
    return path


class TestParser:
    def test_list(self, capsys):
        assert main(["--list"]) == 0
        names = [line.split()[0] for line in _lines(capsys)]
        assert "plancherel" in names
        assert names == sorted(names)

    def test_no_command_prints_help(self, capsys):
        assert main([]) == 0
        assert "usage" in capsys.readouterr().out

    def test_unknown_command(self):
        with pytest.raises(SystemExit) as info:
            main(["no-such-command"])
        assert info.value.code == 2


class TestSignals:
    def test_sqfn_partition_is_isometric(self, capsys, signal_file, tmp_path):
        out = str(tmp_path / "tf.txt")
        assert main(["sqfn", "--n", "64", "--family", "partition", "--input", signal_file, "--output", out]) == 0
        values = _values(_lines(capsys))
        assert float(values["norm_Tf_2"]) == pytest.approx(float(values["norm_f_2"]), rel=1e-12)
        assert read_signal(out).n == 64

    def test_sqfn_grid_mismatch(self, signal_file):
        assert main(["sqfn", "--n", "128", "--input", signal_file]) == 2

    def test_sqfn_bad_family(self):
        assert main(["sqfn", "--n", "64", "--family", "bogus"]) == 2

    def test_sqfn_missing_file(self, tmp_path):
        assert main(["sqfn", "--n", "64", "--input", str(tmp_path / "absent.txt")]) in (2, 5)


class TestSparse:
    def test_build_then_verify(self, capsys, signal_file, tmp_path):
        out = str(tmp_path / "sparse.txt")
        assert main(["sparse-build", "--n", "64", "--input-f", signal_file, "--output", out]) == 0
        values = _values(_lines(capsys))
        assert float(values["max_packing"]) <= 0.5
        assert len(read_sparse(out)) > 0
        assert main(["sparse-verify", out]) == 0
        assert _values(_lines(capsys))["valid"] == "true"

    def test_verify_rejects_large_eta(self, capsys, spike_file, tmp_path):
        out = str(tmp_path / "sparse.txt")
        assert main(["sparse-build", "--n", "64", "--input-f", spike_file, "--output", out]) == 0
        capsys.readouterr()
        assert main(["sparse-verify", "--eta", "0.9", out]) == 1
        assert _values(_lines(capsys))["valid"] == "false"


class TestTiles:
    def test_dump(self, capsys, tmp_path):
        dump = str(tmp_path / "tiles.txt")
        assert main(["tiles", "--n", "64", "--dump", dump]) == 0
        count = int(_values(_lines(capsys))["tiles"])
        with open(dump) as handle:
            rows = [line.split() for line in handle if line.strip()]
        assert len(rows) == count
        for k, scale, position, a, b in rows:
            assert (1 << int(scale)) * (int(b) - int(a)) == 64

    def test_model_form(self, capsys, signal_file):
        assert main(["model-form", "--n", "64", "--input-f", signal_file]) == 0
        lines = _lines(capsys)
        assert float(lines[0].split(",")[1]) > 0
        assert lines[1] == "level,tree_count,sum_IT,size_cap"


class TestWeights:
    def test_weights_table(self, capsys):
        assert main(["weights", "--n", "16", "--weight", "constant:2", "--p", "2", "3", "--report"]) == 0
        lines = _lines(capsys)
        assert lines[0] == "characteristic,p,value"
        assert len(lines) == 5

    def test_opnorm(self, capsys):
        assert main(["opnorm", "--n", "64", "--family", "unit", "--p", "1.5", "--budget", "2"]) == 0
        header, row = _lines(capsys)
        assert header == "mode,p,lower_bound,witness,trials"
        assert float(row.split(",")[2]) >= 64 ** (1 / 6) * (1 - 1e-12)

    def test_exponent_fit_needs_p_above_two(self):
        assert main(["exponent-fit", "--n", "64", "--p", "2"]) == 2

    def test_bad_weight(self):
        assert main(["weights", "--n", "16", "--weight", "power:x"]) == 2


class TestExperiments:
    def test_exponent_table(self, capsys, tmp_path):
        assert main(["exponent-table", "--out", str(tmp_path)]) == 0
        paths = _lines(capsys)
        assert [p.rsplit("/", 1)[-1] for p in paths] == ["report.json", "data.csv", "plot.dat"]

    def test_failed_assertion_exit_code(self, tmp_path):
        assert main(["plancherel", "--n", "64", "--budget", "2", "--family", "lacunary:2", "--out", str(tmp_path)]) == 1

    def test_invalid_size(self, tmp_path):
        assert main(["plancherel", "--n", "48", "--out", str(tmp_path)]) == 2
