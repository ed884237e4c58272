"""Tests for configuration, exceptions, the worker pool, storage, codecs and grid checks"""

import json
import threading

import numpy as np
import pytest
from pydantic import ValidationError

from rlplab.core import (
    ComputationException,
    ExperimentAssertionException,
    GridMismatchException,
    PreconditionException,
    ReportIOException,
    UnknownExperimentException,
    ValidationException,
    check_shifted_grids,
    init_grids,
    init_output_dir,
    parallel_map,
    read_json,
    settings,
    to_exit_code,
    write_csv,
    write_json,
    write_plot,
)
from rlplab.core.config import Settings
from rlplab.schemas import GridInterval, Signal, SparseFamily, SparseMember
from rlplab.utils import conjugate_exponent, coverage_counts, dyadic_blocks, grid_shift, periodic_distance, sweep_sizes
from rlplab.utils.codecs import parse_signal, read_signal, read_sparse, write_signal, write_sparse


class TestExitCodes:
    @pytest.mark.parametrize(
        "exc, code",
        [
            (ExperimentAssertionException(), 1),
            (ValidationException("bad"), 2),
            (GridMismatchException(), 2),
            (PreconditionException(), 2),
            (ComputationException(), 3),
            (UnknownExperimentException(), 4),
            (ReportIOException(), 5),
            (ValueError("plain"), 2),
            (RuntimeError("boom"), 3),
        ],
    )
    def test_mapping(self, exc, code):
        assert to_exit_code(exc) == code

    def test_subclasses_share_the_base(self):
        assert isinstance(GridMismatchException(), ValidationException)
        assert str(ValidationException("bad n")) == "bad n"


class TestSettings:
    def test_defaults(self):
        assert settings.SPARSE_ETA == pytest.approx(1 / 6)
        assert settings.EXPERIMENT_MIN_N == 64
        assert settings.THREADS >= 1

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("RLPLAB_THREADS", "3")
        monkeypatch.setenv("RLPLAB_LOG_LEVEL", "debug")
        local = Settings()
        assert local.THREADS == 3
        assert local.LOG_LEVEL == "DEBUG"

    def test_invalid_threads(self, monkeypatch):
        monkeypatch.setenv("RLPLAB_THREADS", "0")
        with pytest.raises(ValidationError):
            Settings()


class TestParallelMap:
    def test_keeps_input_order(self):
        assert parallel_map(lambda x: x * x, list(range(50))) == [x * x for x in range(50)]

    def test_nested_calls_run_inline(self):
        def outer(x):
            return sum(parallel_map(lambda y: y + x, [1, 2, 3]))

        assert parallel_map(outer, [0, 10, 20]) == [6, 36, 66]

    def test_empty_and_single(self):
        assert parallel_map(str, []) == []
        assert parallel_map(lambda _: threading.current_thread().name, [0]) == [threading.current_thread().name]


class TestStorage:
    def test_json_sorted_and_non_finite(self, tmp_path):
        path = write_json(str(tmp_path / "r.json"), {"b": 1.5, "a": float("inf"), "c": [float("nan")]})
        text = open(path).read()
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text) == {"a": "inf", "b": 1.5, "c": ["nan"]}
        assert read_json(path)["b"] == 1.5

    def test_csv_and_plot(self, tmp_path):
        csv = write_csv(str(tmp_path / "d.csv"), ["n", "x", "ok"], [(64, 0.1, True), (128, float("inf"), False)])
        assert open(csv).read() == "n,x,ok\n64,0.1,true\n128,inf,false\n"
        dat = write_plot(str(tmp_path / "p.dat"), ["n", "x"], [])
        assert open(dat).read() == "# n x\n"

    def test_output_dir_created(self, tmp_path):
        target = init_output_dir(str(tmp_path / "nested" / "reports"))
        assert (tmp_path / "nested" / "reports").is_dir()
        assert target.endswith("reports")

    def test_unwritable_path(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        with pytest.raises(ReportIOException):
            init_output_dir(str(blocker / "sub"))


class TestCodecs:
    def test_signal_file(self, tmp_path, random_signal):
        f = random_signal(16, domain_length=2.0)
        g = read_signal(write_signal(str(tmp_path / "f.txt"), f))
        assert g.domain_length == 2.0
        np.testing.assert_array_equal(g.samples, f.samples)

    def test_malformed_signal(self):
        with pytest.raises(ValidationException):
            parse_signal(["16 1.0", "1 0"])
        with pytest.raises(ValidationException):
            parse_signal([])

    def test_missing_file(self, tmp_path):
        with pytest.raises(ReportIOException):
            read_signal(str(tmp_path / "absent.txt"))

    def test_sparse_file(self, tmp_path):
        member = SparseMember(interval=GridInterval(start=4, length=8, n=16), witness=[4, 5, 6, 7])
        family = SparseFamily(members=(member,), eta=0.5, n=16)
        read = read_sparse(write_sparse(str(tmp_path / "s.txt"), family))
        assert read.n == 16
        assert read.eta == 0.5
        assert read.members[0].interval.key() == (4, 8)
        assert list(read.members[0].witness) == [4, 5, 6, 7]

    def test_sparse_without_header(self, tmp_path):
        path = tmp_path / "s.txt"
        path.write_text("0 4 | 0 1\n")
        with pytest.raises(ValidationException):
            read_sparse(str(path))


class TestHelpers:
    def test_grid_shift(self):
        assert [grid_shift(j, 3) for j in range(3)] == [0, 3, 5]
        assert grid_shift(1, 0) == 0

    def test_periodic_distance(self):
        d = periodic_distance(np.arange(16), 14, 4, 16)
        assert d[14] == 0 and d[1] == 0 and d[2] == 1 and d[13] == 1

    def test_coverage(self):
        counts = coverage_counts([(0, 4), (2, 6)], 8)
        assert list(counts) == [1, 1, 2, 2, 1, 1, 0, 0]

    def test_conjugate(self):
        assert conjugate_exponent(2) == 2
        assert conjugate_exponent(1.5) == pytest.approx(3.0)

    def test_sweep_and_blocks(self):
        assert sweep_sizes(2048) == [256, 512, 1024, 2048]
        assert sweep_sizes(64, minimum=64) == [64]
        assert sum(dyadic_blocks(13)) == 13
        assert all(b & (b - 1) == 0 for b in dyadic_blocks(13))


class TestGridInit:
    def test_small_grids_pass(self):
        assert check_shifted_grids(16) > 0
        assert check_shifted_grids(64) > 0

    def test_cached(self):
        init_grids(128)
        assert init_grids(128) is False

    def test_rejects_non_power(self):
        with pytest.raises(ValidationException):
            check_shifted_grids(48)


class TestSchemas:
    def test_signal_length(self):
        with pytest.raises(ValidationError):
            Signal(samples=np.zeros(24))
        with pytest.raises(ValidationError):
            Signal(samples=np.zeros(8))

    def test_signal_frozen(self):
        f = Signal.zeros(16)
        with pytest.raises(ValueError):
            f.samples[0] = 1.0

    def test_interval_wraps(self):
        interval = GridInterval(start=14, length=4, n=16)
        assert list(interval.indices()) == [14, 15, 0, 1]
        assert interval.tripled().key() == (10, 12)
        assert GridInterval(start=0, length=8, n=16).tripled().is_full
