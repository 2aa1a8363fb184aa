from pathlib import Path

from cpm.cli import main
from cpm.pipeline import preamble_line

WDT_SOURCE = """extern redundant_t int watchdog;
cyclic_t int manage(TOM*);
manage.Cycle = 100;
watchdog = 1;
"""


def write_input(tmp_path, text=WDT_SOURCE, name="in.cpm"):
    path = tmp_path / name
    path.write_text(text, encoding="latin-1")
    return path


def test_list_extensions(capsys):
    assert main(["--list-extensions"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out == [
        "cpm://redundancy/1.1",
        "cpm://refractive/0.5",
        "cpm://array/0.5",
        "cpm://cyclic/1.0",
    ]


def test_transform_with_ordered_extensions(tmp_path):
    src = write_input(tmp_path)
    out = tmp_path / "out.c"
    report = tmp_path / "report.txt"
    rc = main([
        "--ext", "redundancy", "--ext", "refractive", "--ext", "array",
        str(src), "-o", str(out), "--emit-report", str(report),
    ])
    assert rc == 0
    text = out.read_text(encoding="latin-1")
    assert text.splitlines()[0] == preamble_line(
        "cpm://redundancy/1.1;cpm://refractive/0.5;cpm://array/0.5"
    )
    assert "cpm_red_extern(watchdog, int);" in text
    report_lines = report.read_text().splitlines()
    assert report_lines[0] == (
        "extensions_pipeline=cpm://redundancy/1.1;cpm://refractive/0.5;cpm://array/0.5"
    )
    assert report_lines[1:4] == [
        "applied=cpm://redundancy/1.1",
        "applied=cpm://refractive/0.5",
        "applied=cpm://array/0.5",
    ]


def test_versioned_extension_requests(tmp_path):
    src = write_input(tmp_path)
    out = tmp_path / "out.c"
    assert main(["--ext", "redundancy@1.1", str(src), "-o", str(out)]) == 0
    assert main(["--ext", "redundancy@2.0", str(src), "-o", str(out)]) == 1


def test_unknown_extension_exits_one_and_names_registered(tmp_path, capsys):
    src = write_input(tmp_path)
    rc = main(["--ext", "nosuch", str(src), "-o", str(tmp_path / "x.c")])
    assert rc == 1
    err = capsys.readouterr().err
    assert "nosuch" in err and "redundancy" in err and "cyclic" in err


def test_missing_input_exits_one_without_output(tmp_path):
    out = tmp_path / "never.c"
    rc = main(["--ext", "redundancy", str(tmp_path / "missing.cpm"), "-o", str(out)])
    assert rc == 1
    assert not out.exists()


def test_default_output_path_swaps_suffix(tmp_path):
    src = write_input(tmp_path, name="prog.cpm")
    assert main(["--ext", "cyclic", str(src)]) == 0
    assert (tmp_path / "prog.c").exists()


def test_refuses_to_overwrite_input(tmp_path):
    src = write_input(tmp_path, name="prog.c")
    assert main(["--ext", "cyclic", str(src)]) == 1


def test_runs_are_byte_identical(tmp_path):
    src = write_input(tmp_path)
    a, b = tmp_path / "a.c", tmp_path / "b.c"
    flags = ["--ext", "redundancy", "--ext", "cyclic", str(src)]
    assert main(flags + ["-o", str(a)]) == 0
    assert main(flags + ["-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_no_extension_output_is_input_plus_preamble(tmp_path):
    body = "int plain = 1;\n"
    src = write_input(tmp_path, text=body)
    out = tmp_path / "out.c"
    assert main([str(src), "-o", str(out)]) == 0
    assert out.read_text(encoding="latin-1") == preamble_line("") + "\n" + body


def test_config_file_feeds_passes(tmp_path):
    src = write_input(tmp_path, text="redundant_t int x;\n")
    ini = tmp_path / "ext.ini"
    ini.write_text("[redundancy]\nreplicas = 5\n")
    out = tmp_path / "out.c"
    assert main(["--ext", "redundancy", "--config", str(ini), str(src), "-o", str(out)]) == 0
    assert "cpm_red_storage(x, int, 5);" in out.read_text(encoding="latin-1")


def test_warnings_do_not_change_exit_status(tmp_path, capsys):
    src = write_input(tmp_path, text="redundant_t int x;\np = &x;\n")
    out = tmp_path / "out.c"
    rc = main(["--ext", "redundancy", str(src), "-o", str(out), "--emit-report", str(tmp_path / "r.txt")])
    assert rc == 0
    assert "address" in capsys.readouterr().err
    report = (tmp_path / "r.txt").read_text()
    assert "diagnostic=warning" in report


def test_strict_tags_flag(tmp_path, capsys):
    src = write_input(tmp_path, text="cyclic_t int f(void);\n")
    out = tmp_path / "out.c"
    rc = main(["--ext", "redundancy", "--strict-tags", str(src), "-o", str(out)])
    assert rc == 0
    assert "cyclic_t" in capsys.readouterr().err


def test_latin1_bytes_survive(tmp_path):
    body = "/* caf\xe9 */\nint x;\n"
    src = write_input(tmp_path, text=body)
    out = tmp_path / "out.c"
    assert main([str(src), "-o", str(out)]) == 0
    assert out.read_text(encoding="latin-1").endswith(body)
