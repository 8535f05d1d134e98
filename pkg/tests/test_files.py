"""Tests for chain/spectrum JSON and CSV tables."""

import io
import math

import pytest

from pstlab.core.exceptions import ChainFileError
from pstlab.models.schemas import Spectrum
from pstlab.services import files
from pstlab.services.synthesis import special_r2_spectrum


class TestChainFiles:
    def test_round_trip_is_exact(self, trex149, tmp_path):
        path = tmp_path / "trex.json"
        files.write_chain(trex149, path)
        loaded = files.read_chain(path)
        assert loaded == trex149
        assert loaded.couplings == trex149.couplings

    def test_document_layout(self, kraw8):
        text = files.dumps_chain(kraw8).decode()
        assert '"format_version": 1' in text
        assert '"generator": "krawtchouk"' in text

    def test_length_mismatch(self):
        data = b'{"n": 4, "couplings": [1.0, 2.0], "diagonal": [0, 0, 0, 0]}'
        with pytest.raises(ChainFileError):
            files.parse_chain(data)

    @pytest.mark.parametrize("diagonal", ["[]", "[0, 0]", "[0, 0, 0, 0]"])
    def test_diagonal_length_mismatch(self, diagonal):
        data = f'{{"n": 3, "couplings": [1.0, 1.0], "diagonal": {diagonal}}}'.encode()
        with pytest.raises(ChainFileError):
            files.parse_chain(data)

    def test_malformed_json_reports_position(self):
        data = b'{\n  "n": 3,\n  "couplings": [1.0, 2.0,\n'
        with pytest.raises(ChainFileError) as info:
            files.parse_chain(data)
        assert info.value.line is not None
        assert "line" in str(info.value)

    def test_unknown_version(self):
        data = b'{"format_version": 2, "n": 2, "couplings": [1.0], "diagonal": [0, 0]}'
        with pytest.raises(ChainFileError):
            files.parse_chain(data)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ChainFileError):
            files.read_chain(tmp_path / "absent.json")


class TestSpectrumFiles:
    def test_r2_spectrum_validity(self):
        spectrum = files.parse_spectrum(files.dumps_spectrum(special_r2_spectrum(8, 51)))
        assert spectrum.values == (-307.0, -205.0, -103.0, -1.0, 1.0, 103.0, 205.0, 307.0)
        assert spectrum.base_gap == pytest.approx(2.0)
        assert spectrum.transfer_time == pytest.approx(math.pi / 2)

    def test_base_gap_detected_when_absent(self):
        spectrum = files.parse_spectrum(b'{"values": [-3, -1, 1, 3]}')
        assert spectrum.base_gap == pytest.approx(2.0)

    def test_invalid_base_gap(self):
        with pytest.raises(ChainFileError):
            files.parse_spectrum(b'{"values": [-1, 0, 1], "base_gap": 0.5}')

    def test_write_read(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_bytes(files.dumps_spectrum(Spectrum(values=(-1.0, 1.0)), label="pair"))
        assert files.read_spectrum(path).values == (-1.0, 1.0)


class TestTables:
    def test_seventeen_significant_digits(self):
        stream = io.StringIO()
        files.write_csv(stream, ("a", "b"), [(0.1, 3)])
        assert stream.getvalue() == "a,b\n0.10000000000000001,3\n"

    def test_read_table(self, tmp_path):
        path = tmp_path / "window.csv"
        path.write_text("offset,density\n-0.1,0\n0,10\n0.1,0\n")
        header, rows = files.read_csv_table(path)
        assert header == ["offset", "density"]
        assert rows == [[-0.1, 0.0], [0.0, 10.0], [0.1, 0.0]]

    def test_non_numeric_cell(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("offset,density\n-0.1,zero\n")
        with pytest.raises(ChainFileError) as info:
            files.read_csv_table(path)
        assert info.value.line == 2
