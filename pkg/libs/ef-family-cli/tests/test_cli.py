from datetime import UTC, datetime

import pytest

from effamily.canonical import canonical_bytes, loads
from effamily_cli.commands import _cycled_mask
from effamily_cli.config import EXIT_ERROR, EXIT_FAILED, EXIT_OK, load_settings
from effamily_cli.main import build_parser, cli_main


def _json_out(capsys):
    return loads(capsys.readouterr().out)


@pytest.fixture
def fixed_time(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    monkeypatch.delenv("EF_SEARCH_CAP", raising=False)


@pytest.fixture
def tree_file(tmp_path, fixed_time, capsys):
    path = tmp_path / "tree.json"
    status = cli_main(["build", "--alpha", "1", "--beta", "2", "--delta", "1/2", "--levels", "1", "--out", str(path)])
    assert status == EXIT_OK
    capsys.readouterr()
    return path


@pytest.fixture
def seq_file(tmp_path, fixed_time, capsys):
    path = tmp_path / "seq.json"
    assert cli_main(["seq", "--mask", "U", "--depth", "8", "--out", str(path)]) == EXIT_OK
    capsys.readouterr()
    return path


def test_build_then_verify(tmp_path, fixed_time, capsys):
    path = tmp_path / "tree.json"
    argv = ["build", "--alpha", "1", "--beta", "2", "--delta", "1/2", "--levels", "1", "--out", str(path)]
    assert cli_main(argv) == EXIT_OK
    built = _json_out(capsys)
    assert built["kind"] == "tree"
    assert built["passed"] is True
    assert built["k"][0] == 2
    first = path.read_bytes()
    assert loads(first)["provenance"]["createdAt"] == "2023-11-14T22:13:20Z"

    # same command, same SOURCE_DATE_EPOCH: same bytes
    assert cli_main(argv) == EXIT_OK
    capsys.readouterr()
    assert path.read_bytes() == first

    assert cli_main(["verify", str(path)]) == EXIT_OK
    verified = _json_out(capsys)
    assert verified["passed"] is True
    assert verified["failures"] == []


def test_verify_reports_tampering(tree_file, capsys):
    raw = tree_file.read_bytes()
    assert b'"27/64"' in raw
    tree_file.write_bytes(raw.replace(b'"27/64"', b'"7/16"', 1))
    assert cli_main(["verify", str(tree_file)]) == EXIT_FAILED
    result = _json_out(capsys)
    assert result["passed"] is False
    assert result["failures"]


def test_verify_malformed_archive(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_bytes(b"{")
    assert cli_main(["verify", str(path)]) == EXIT_ERROR
    assert _json_out(capsys)["error"] == "ArchiveError"


def test_inconsistent_witness_index(tree_file, capsys):
    data = loads(tree_file.read_bytes())
    data["payload"]["levels"][1]["strings"][0]["nS"] = 999
    tree_file.write_bytes(canonical_bytes(data))

    assert cli_main(["verify", str(tree_file)]) == EXIT_FAILED
    result = _json_out(capsys)
    assert result["passed"] is False
    assert result["failures"][0]["subject"] == "tree"
    assert result["failures"][0]["violation"]["requirement"] == "c_range"

    assert cli_main(["witness", str(tree_file), "--xi", "1", "--zeta", "0"]) == EXIT_ERROR
    assert _json_out(capsys)["error"] == "ArchiveError"


def test_witness(tree_file, capsys):
    assert cli_main(["witness", str(tree_file), "--xi", "1", "--zeta", "0"]) == EXIT_OK
    data = _json_out(capsys)
    entry = data["entries"][0]
    assert (entry["s"], entry["t"]) == ("0", "1")
    assert entry["nS"] == 4
    assert entry["ratioST"] == "27/64"
    assert entry["bound"] == "1/2"
    assert data["bandMinima"]


def test_witness_needs_distinct_strings(tree_file, capsys):
    assert cli_main(["witness", str(tree_file), "--xi", "0", "--zeta", "0"]) == EXIT_ERROR
    assert _json_out(capsys)["error"] == "NotDistinct"


def test_seq_to_stdout(fixed_time, capsys):
    assert cli_main(["seq", "--mask", "HU", "--depth", "6"]) == EXIT_OK
    archive = _json_out(capsys)
    assert archive["kind"] == "seq"
    assert archive["payload"]["mask"] == "HUHUH"
    assert archive["payload"]["values"][:3] == ["1/1", "1/1", "1/1"]
    assert archive["provenance"]["argv"] == ["seq", "--mask", "HU", "--depth", "6"]


def test_seq_rejects_bad_params(capsys):
    assert cli_main(["seq", "--mask", "U", "--alpha", "2", "--beta", "1"]) == EXIT_ERROR
    assert _json_out(capsys)["error"] == "InvalidExponents"


def test_reduce(seq_file, capsys):
    assert cli_main(["reduce", str(seq_file), "--x", "1,1/2", "--xhat", "0,-1/4"]) == EXIT_OK
    data = _json_out(capsys)
    assert data["l1Distance"] == "7/4"
    assert data["report"]["passed"] is True
    assert data["member"] is None
    assert all(int(m) % 2 == 1 for m in data["yhat"])


def test_reduce_beyond_depth(seq_file, capsys):
    x = ",".join(["1"] * 8)
    assert cli_main(["reduce", str(seq_file), "--x", x, "--xhat", "0"]) == EXIT_ERROR
    assert _json_out(capsys)["error"] == "DepthExceeded"


def test_export_csv(seq_file, capsys):
    assert cli_main(["export", str(seq_file), "--format", "csv"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,u,uDecimal,phi,phiDecimal,f,fDecimal,kappaBeta,kappaBetaDecimal"
    assert len(lines) == 1 + 9


def test_export_tree_member(tree_file, capsys):
    assert cli_main(["export", str(tree_file), "--xi", "1"]) == EXIT_OK
    data = _json_out(capsys)
    assert data["member"] == "1"


def test_export_xi_on_seq_archive(seq_file, capsys):
    assert cli_main(["export", str(seq_file), "--xi", "0"]) == EXIT_ERROR
    assert _json_out(capsys)["error"] == "LevelUnavailable"


def test_build_requires_params():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["build", "--levels", "1", "--out", "x.json"])


def test_load_settings():
    settings = load_settings({})
    assert settings.search_cap == 2**20
    assert settings.log_level == "WARNING"
    assert settings.created_at is None

    settings = load_settings({"EF_SEARCH_CAP": "64", "EF_LOG_LEVEL": "debug", "SOURCE_DATE_EPOCH": "0"})
    assert settings.search_cap == 64
    assert settings.log_level == "DEBUG"
    assert settings.created_at == datetime(1970, 1, 1, tzinfo=UTC)


@pytest.mark.parametrize("environ", [{"EF_SEARCH_CAP": "0"}, {"EF_SEARCH_CAP": "many"}, {"SOURCE_DATE_EPOCH": "-1"}])
def test_load_settings_rejects(environ):
    with pytest.raises(ValueError):
        load_settings(environ)


def test_cycled_mask():
    assert _cycled_mask("HU", 6) == "HUHUH"
    assert _cycled_mask("", 3) == "HH"
    assert _cycled_mask("UH", None) == "UH"
