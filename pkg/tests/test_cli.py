"""Flag grammar, config files, exit codes, and key hygiene."""
import pytest

from secphy import cli, harness
from secphy.cli import CliError


def test_parse_sweep_forms():
    assert cli.parse_sweep("0:2:6") == (0.0, 2.0, 4.0, 6.0)
    assert cli.parse_sweep("4:2:5") == (4.0,)          # stop is inclusive
    assert cli.parse_sweep("1:0.5:2") == (1.0, 1.5, 2.0)
    assert cli.parse_sweep("3,7,11.5") == (3.0, 7.0, 11.5)
    assert cli.parse_sweep("8") == (8.0,)
    for bad in ("0:2", "a:b:c", "0:-1:4", "0:0:4", "1,two", "5:1:4"):
        with pytest.raises(CliError):
            cli.parse_sweep(bad)


def test_build_config_defaults_and_overrides():
    cfg, out = cli.build_config({"ebn0": "0:2:4"})
    assert cfg.mode == "montecarlo"
    assert cfg.modulation == 16
    assert cfg.ebn0_sweep == (0.0, 2.0, 4.0)
    assert out is None

    cfg, out = cli.build_config({
        "mode": "theoretical", "mod": "64", "ebn0": "10,12",
        "seed": "9", "cp": "16", "stbc": "on", "out": "x.csv",
    })
    assert cfg.modulation == 64 and cfg.seed == 9
    assert cfg.cp_ratio == 1 / 16 and cfg.stbc
    assert out == "x.csv"


def test_build_config_rejections():
    with pytest.raises(CliError):
        cli.build_config({})                           # no sweep
    with pytest.raises(CliError):
        cli.build_config({"ebn0": "4", "profile": "0", "mod": "16"})
    with pytest.raises(CliError):
        cli.build_config({"ebn0": "4", "bogus_key": "1"})
    with pytest.raises(CliError):
        cli.build_config({"ebn0": "4", "cp": "5"})
    with pytest.raises(CliError):
        cli.build_config({"ebn0": "4", "seed": "soon"})
    with pytest.raises(CliError):
        cli.build_config({"ebn0": "4", "stbc": "yes"})
    with pytest.raises(CliError):                      # SimConfig rejection
        cli.build_config({"ebn0": "4", "mod": "8"})


def test_config_file_parsing(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "# coded sweep\n"
        "mode = montecarlo\n"
        "profile = 1          # rate id\n"
        "max-bits = 20000\n"
        "\n"
        "ebn0 = 6:2:10\n"
    )
    values = cli.read_config_file(str(path))
    assert values == {"mode": "montecarlo", "profile": "1",
                      "max_bits": "20000", "ebn0": "6:2:10"}
    cfg, _ = cli.build_config(values)
    assert cfg.profile == 1 and cfg.max_bits == 20000

    bad = tmp_path / "bad.cfg"
    bad.write_text("mode montecarlo\n")
    with pytest.raises(CliError):
        cli.read_config_file(str(bad))
    bad.write_text("mode =\n")
    with pytest.raises(CliError):
        cli.read_config_file(str(bad))


def test_main_runs_sweep_to_stdout(capsys):
    rc = cli.main(["--mode", "theoretical", "--mod", "32",
                   "--ebn0", "8:2:12"])
    out = capsys.readouterr().out
    assert rc == 0
    pts = harness.parse_csv(out)
    assert [p.ebn0_db for p in pts] == [8.0, 10.0, 12.0]
    assert all(p.mode == "theoretical" for p in pts)


def test_main_writes_csv_file(tmp_path, capsys):
    out = tmp_path / "t.csv"
    rc = cli.main(["--mode", "theoretical", "--ebn0", "10",
                   "--out", str(out)])
    assert rc == 0
    assert capsys.readouterr().out == ""
    assert out.read_text().startswith(harness.CSV_HEADER)


def test_main_flags_override_config_file(tmp_path, capsys):
    path = tmp_path / "run.cfg"
    path.write_text("mode = theoretical\nmod = 16\nebn0 = 10\n")
    rc = cli.main(["--config", str(path), "--mod", "64"])
    assert rc == 0
    pts = harness.parse_csv(capsys.readouterr().out)
    import secphy.modem as modem
    assert pts[0].ber == pytest.approx(modem.theoretical_ber(64, 10.0),
                                       rel=1e-4)


def test_main_exit_codes(tmp_path, capsys):
    assert cli.main(["--list-profiles"]) == 0
    table = capsys.readouterr().out
    assert "64-QAM" in table and "(64,48)" in table

    assert cli.main(["--dump-constellation", "16"]) == 0
    dump = capsys.readouterr().out
    assert dump.startswith("label,i,q")
    assert len(dump.strip().split("\n")) == 17

    assert cli.main(["--mode", "warp", "--ebn0", "4"]) == 1
    assert "secphy: error:" in capsys.readouterr().err

    assert cli.main(["--no-such-flag"]) == 1
    assert "secphy: error:" in capsys.readouterr().err

    assert cli.main(["--config", str(tmp_path / "missing.cfg")]) == 2
    assert "i/o error" in capsys.readouterr().err

    rc = cli.main(["--mode", "theoretical", "--ebn0", "4",
                   "--out", str(tmp_path / "nodir" / "x.csv")])
    assert rc == 2


def test_key_errors_never_echo_key_material(capsys):
    # a mistyped key must not surface in diagnostics
    leaked = "133457799bbcdff"                         # 15 digits, hex-valid
    rc = cli.main(["--ebn0", "4", "--profile", "0", "--security", "on",
                   "--enc-key", leaked, "--mac-key", "0123456789abcdef"])
    err = capsys.readouterr().err
    assert rc == 1
    assert "16 hex digits" in err
    assert leaked not in err

    gibberish = "notahexkey!!"
    rc = cli.main(["--ebn0", "4", "--profile", "0", "--security", "on",
                   "--enc-key", gibberish, "--mac-key", "0123456789abcdef"])
    err = capsys.readouterr().err
    assert rc == 1
    assert gibberish not in err


def test_dump_constellation_rejects_unknown_order():
    with pytest.raises(CliError):
        cli.dump_constellation("8")
    with pytest.raises(CliError):
        cli.dump_constellation("big")
