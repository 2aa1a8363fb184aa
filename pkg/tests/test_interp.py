import pytest

from cpm.interp import AbiInterpreter, InterpError
from cpm.pipeline import compose, run
from cpm.runtime import Runtime
from cpm.srcmodel import load_unit


def fresh():
    rt = Runtime()
    return rt, AbiInterpreter(rt)


def test_preamble_sets_pipeline_string():
    rt, it = fresh()
    it.run_text('const char *extensions_pipeline = "cpm://cyclic/1.0"; /* cpm preamble */\n')
    assert rt.registry.pipeline_string == "cpm://cyclic/1.0"


def test_storage_write_read_cycle():
    rt, it = fresh()
    it.run_text("cpm_red_storage(x, int, 3);\ncpm_red_write(x, (5));\ny = cpm_red_read(x) + 1;\n")
    assert rt.replicas["x"].replicas == (5, 5, 5)
    assert it.env["y"] == 6


def test_declarations_and_assignments():
    rt, it = fresh()
    it.run_text("int a = 2;\nint b;\nb = a * 3;\nb += 1;\nb++;\n")
    assert it.env == {"a": 2, "b": 8}


def test_prototypes_and_braces_are_ignored():
    rt, it = fresh()
    it.run_text("int f(int);\nint main(void) {\n}\nreturn 0;\n")
    assert "f" not in it.env


def test_context_registration_and_access():
    rt, it = fresh()
    it.run_text('cpm_ctx_register(watchdog, both, "watchdog");\n')
    rt.registry.bind_actuator("watchdog", lambda v: rt.sensor_update("watchdog", v))
    it.run_text("cpm_ctx_write(watchdog, (7));\nstate = cpm_ctx_read(watchdog);\n")
    assert it.env["state"] == 7


def test_guard_registration_binds_python_body():
    rt, it = fresh()
    hits = []
    it.bind_function("notify", lambda: hits.append(rt.clock.now))
    it.run_text(
        'cpm_ctx_register(watchdog, sensor, "watchdog");\n'
        'cpm_guard_register(notify, "watchdog == 3");\n'
    )
    rt.sensor_update("watchdog", 3)
    assert hits == [0]


def test_array_calls_translate_names():
    rt, it = fresh()
    it.run_text("cpm_arr_register(linkrates);\n")
    rt.registry.arrays["linkrates"].set_prop("m1", "rate", 10.0)
    it.env["mac"] = "m1"
    it.run_text("r = cpm_arr_get(linkrates, (mac), rate);\nfirst = anext(linkrates, 0);\n")
    assert it.env["r"] == 10.0
    assert it.env["first"] == "m1"


def test_cycle_calls_schedule_actions():
    rt, it = fresh()
    ticks = []
    it.bind_function("Tick", lambda: ticks.append(rt.clock.now))
    it.run_text("cpm_cycle_register(Tick);\ncpm_cycle_set(Tick, (10));\n")
    rt.advance(30)
    assert ticks == [10, 20, 30]
    it.run_text("cpm_cycle_set(Tick, (0));\n")
    rt.advance(30)
    assert ticks == [10, 20, 30]


def test_c_logic_operators_in_expressions():
    rt, it = fresh()
    it.run_text("int a = 1;\nint b = 0;\nc = a && !b;\nd = b || a;\n")
    assert it.env["c"] is True and it.env["d"] == 1


def test_unsupported_statement_raises():
    rt, it = fresh()
    with pytest.raises(InterpError):
        it.run_text("while (1) x = 1\n")  # no semicolon, not a block header


def test_unknown_name_raises_interp_error():
    rt, it = fresh()
    with pytest.raises(InterpError):
        it.run_text("y = nothere + 1;\n")


def test_full_lowered_program_end_to_end():
    src = (
        "redundant_t int counter;\n"
        "counter = 0;\n"
        "counter += 40;\n"
        "counter++;\n"
        "result = counter + 1;\n"
    )
    out, _ = run(compose(["redundancy"]), load_unit(src))
    rt, it = fresh()
    it.run_unit(out)
    assert rt.registry.pipeline_string == "cpm://redundancy/1.1"
    assert rt.replicas["counter"].replicas == (41, 41, 41)
    assert it.env["result"] == 42
