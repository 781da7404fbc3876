import hashlib

import numpy as np
import pytest

from rotorlab.data import amplitude_frame, distribution_frame, load_frame, series_frame, write_frame
from rotorlab.errors import DataError


class TestFrames:
    def test_series_frame(self):
        df = series_frame([0, 1, 2], energy=[0.0, 0.5, 2.0])
        assert list(df.columns) == ["t", "energy"]
        assert df["t"].dtype == np.int64

    def test_amplitude_frame(self):
        df = amplitude_frame([-1, 0, 1], np.array([1j, 0.5, -0.25]))
        assert df["im"].tolist() == [1.0, 0.0, -0.0]

    def test_distribution_frame(self):
        assert distribution_frame([0], [1.0])["prob"].iloc[0] == 1.0


class TestFiles:
    def test_write_and_load(self, tmp_path):
        df = series_frame([0, 1], value=[0.1 + 0.2, 1.0 / 3.0])
        path = tmp_path / "nested" / "series.csv"
        digest = write_frame(df, path)
        assert digest == hashlib.sha256(path.read_bytes()).hexdigest()
        assert not (tmp_path / "nested" / "series.csv.tmp").exists()
        back = load_frame(path)
        assert back["value"].tolist() == df["value"].tolist()

    def test_identical_frames_identical_bytes(self, tmp_path):
        df = series_frame(np.arange(5), x=np.linspace(0.0, 1.0, 5))
        assert write_frame(df, tmp_path / "a.csv") == write_frame(df.copy(), tmp_path / "b.csv")

    def test_missing(self, tmp_path):
        with pytest.raises(DataError) as info:
            load_frame(tmp_path / "series.csv")
        assert info.value.detail["series"] == "series"
