from cpm.ext_reflective import (
    ArrayPass,
    ContextVarSpec,
    RefractivePass,
    ReflectiveArraySpec,
    lower_array_accesses,
    lower_context_accesses,
    scan_context,
)
from cpm.pipeline import PassConfig
from cpm.srcmodel import load_unit, render


def refract(src, config=None):
    return RefractivePass().transform(load_unit(src), config or PassConfig())


def arrayp(src, config=None):
    return ArrayPass().transform(load_unit(src), config or PassConfig())


def test_context_decl_becomes_registration():
    unit, _ = refract("context_t int watchdog;\n")
    assert render(unit) == 'cpm_ctx_register(watchdog, both, "watchdog");\n'


def test_sensor_and_actuator_decls():
    unit, _ = refract("sensor_t int cpu_load;\nactuator_t int volume;\n")
    out = render(unit).splitlines()
    assert out[0] == 'cpm_ctx_register(cpu_load, sensor, "cpu_load");'
    assert out[1] == 'cpm_ctx_register(volume, actuator, "volume");'


def test_actuator_write_lowering():
    unit, _ = refract("context_t int watchdog;\nwatchdog = 1;\n")
    assert render(unit).splitlines()[1] == "cpm_ctx_write(watchdog, (1));"


def test_sensor_read_lowering():
    unit, _ = refract("context_t int watchdog;\nif (watchdog == WD_FIRED) restart();\n")
    assert render(unit).splitlines()[1] == "if (cpm_ctx_read(watchdog) == WD_FIRED) restart();"


def test_config_declared_sensor_is_lowerable():
    cfg = PassConfig({"refractive.sensors": "watchdog:int"})
    unit, _ = refract("state = watchdog;\n", cfg)
    assert render(unit) == "state = cpm_ctx_read(watchdog);\n"


def test_sensor_only_assignment_warned():
    cfg = PassConfig({"refractive.sensors": "cpu_load"})
    unit, diags = refract("cpu_load = 5;\n", cfg)
    assert render(unit) == "cpu_load = 5;\n"
    assert any("read-only" in d.message for d in diags)


def test_actuator_only_read_warned():
    cfg = PassConfig({"refractive.actuators": "volume"})
    unit, diags = refract("v = volume;\n", cfg)
    assert render(unit) == "v = volume;\n"
    assert any("write-only" in d.message for d in diags)


def test_both_direction_compound_assignment():
    unit, _ = refract("context_t int watchdog;\nwatchdog += 1;\n")
    assert render(unit).splitlines()[1] == "cpm_ctx_write(watchdog, cpm_ctx_read(watchdog) + (1));"


def test_plain_code_untouched_by_refractive():
    src = "plain = 3;\nint f(void);\n"
    unit, diags = refract(src)
    assert render(unit) == src
    assert not diags


def test_extern_declaration_of_context_name_not_warned():
    # the shared-variable pattern: another extension owns the definition
    cfg = PassConfig({"refractive.context": "watchdog"})
    src = "extern redundant_t int watchdog;\n"
    unit, diags = refract(src, cfg)
    assert render(unit) == src
    assert not diags


def test_plain_redefinition_of_context_name_warned():
    cfg = PassConfig({"refractive.context": "watchdog"})
    unit, diags = refract("int watchdog;\n", cfg)
    assert any("redeclared" in d.message for d in diags)


def test_guard_decl_registration():
    src = "sensor_t int watchdog;\nguard_t (watchdog == WD_FIRED) notify;\n"
    unit, _ = refract(src)
    assert render(unit).splitlines()[1] == 'cpm_guard_register(notify, "watchdog == WD_FIRED");'


def test_guard_may_precede_sensor_declaration():
    src = "guard_t (watchdog == WD_FIRED) notify;\nsensor_t int watchdog;\n"
    unit, diags = refract(src)
    assert render(unit).splitlines()[0] == 'cpm_guard_register(notify, "watchdog == WD_FIRED");'
    assert not any("guard" in d.message for d in diags)


def test_guard_without_sensor_dropped_with_warning():
    unit, diags = refract("guard_t (nosensor > 3) notify;\n")
    assert render(unit) == "guard_t (nosensor > 3) notify;\n"
    assert any("no declared sensor" in d.message for d in diags)


def test_array_decl_becomes_registration():
    unit, _ = arrayp("reflective_array_t linkbeacons { beacons:int, silent_periods:int };\n")
    assert render(unit) == "cpm_arr_register(linkbeacons);\n"


def test_array_access_lowering():
    src = (
        "reflective_array_t linkbeacons { beacons:int, silent_periods:int };\n"
        "n = linkbeacons[mac].beacons;\n"
    )
    unit, _ = arrayp(src)
    assert render(unit).splitlines()[1] == "n = cpm_arr_get(linkbeacons, (mac), beacons);"


def test_array_access_via_config():
    cfg = PassConfig({"array.arrays": "linkrates", "array.linkrates": "rate:int"})
    unit, _ = arrayp("r = linkrates[mac].rate;\n", cfg)
    assert render(unit) == "r = cpm_arr_get(linkrates, (mac), rate);\n"


def test_array_unknown_property_warned():
    cfg = PassConfig({"array.arrays": "linkrates", "array.linkrates": "rate:int"})
    unit, diags = arrayp("r = linkrates[mac].bogus;\n", cfg)
    assert render(unit) == "r = linkrates[mac].bogus;\n"
    assert any("unknown property" in d.message for d in diags)


def test_array_key_expression_preserved():
    cfg = PassConfig({"array.arrays": "linkrates", "array.linkrates": "rate:int"})
    unit, _ = arrayp("r = linkrates[peers[i]].rate;\n", cfg)
    assert render(unit) == "r = cpm_arr_get(linkrates, (peers[i]), rate);\n"


def test_array_property_write_warned():
    cfg = PassConfig({"array.arrays": "linkrates", "array.linkrates": "rate:int"})
    unit, diags = arrayp("linkrates[mac].rate = 5;\n", cfg)
    assert render(unit) == "linkrates[mac].rate = 5;\n"
    assert any("unsupported" in d.message for d in diags)


def test_anext_left_as_function_call():
    cfg = PassConfig({"array.arrays": "linkbeacons"})
    src = "mac = anext(linkbeacons);\n"
    unit, _ = arrayp(src, cfg)
    assert render(unit) == src


def test_line_without_array_names_untouched():
    cfg = PassConfig({"array.arrays": "linkbeacons"})
    src = "other[k].beacons = 1;\n"
    unit, diags = arrayp(src, cfg)
    assert render(unit) == src
    assert not diags


def test_idempotence_of_both_passes():
    cfg = PassConfig(
        {
            "refractive.context": "watchdog",
            "array.arrays": "linkbeacons",
            "array.linkbeacons": "beacons:int",
        }
    )
    src = "watchdog = 1;\nk = watchdog + linkbeacons[m].beacons;\n"
    once, _ = refract(src, cfg)
    once, _ = ArrayPass().transform(once, cfg)
    twice, _ = RefractivePass().transform(once, cfg)
    twice, _ = ArrayPass().transform(twice, cfg)
    assert render(once) == render(twice)


def test_lower_ops_direct():
    unit, diags = lower_context_accesses(
        load_unit("watchdog = 1;\n"), [ContextVarSpec("watchdog", "both", "watchdog")]
    )
    assert render(unit) == "cpm_ctx_write(watchdog, (1));\n"
    assert not diags

    unit, diags = lower_array_accesses(
        load_unit("r = linkrates[mac].rate;\n"),
        [ReflectiveArraySpec("linkrates", properties=(("rate", "int"),))],
    )
    assert render(unit) == "r = cpm_arr_get(linkrates, (mac), rate);\n"
    assert not diags


def test_scan_context_returns_all_spec_kinds():
    src = (
        "sensor_t int cpu;\n"
        "actuator_t int vol;\n"
        "reflective_array_t linkbeacons { beacons:int };\n"
        "guard_t (cpu > 90) shed_load;\n"
    )
    unit, scalars, arrays, guards, diags = scan_context(load_unit(src), PassConfig())
    assert {s.name: s.direction for s in scalars} == {"cpu": "sensor", "vol": "actuator"}
    assert [a.name for a in arrays] == ["linkbeacons"]
    assert arrays[0].properties == (("beacons", "int"),)
    assert [g.body_fn for g in guards] == ["shed_load"]
    assert guards[0].guard_expr == "cpu > 90"
