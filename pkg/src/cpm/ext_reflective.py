"""The ``refractive`` and ``array`` passes: context-aware variables.

``refractive`` intercepts scalar context variables. Reads of a sensor return
the runtime's current snapshot; writing an actuator triggers its bound
side-effect callback; a variable may be both. Guarded functions attach a
boolean expression over sensors to a function that runs when the guard turns
true.

``array`` intercepts reflective arrays: dynamically growing, string-indexed
arrays of context objects (``linkbeacons[mac].beacons``) maintained by the
runtime per observation period.

Context variables and arrays may be declared out of band in the pass
configuration, or in the source itself:

    sensor_t int cpu_load;                 -> cpm_ctx_register(cpu_load, sensor, "cpu_load");
    actuator_t int volume;                 -> cpm_ctx_register(volume, actuator, "volume");
    context_t int watchdog;                -> cpm_ctx_register(watchdog, both, "watchdog");
    reflective_array_t linkbeacons { beacons:int, silent_periods:int };
                                           -> cpm_arr_register(linkbeacons);
    guard_t (watchdog == WD_FIRED) on_fire; -> cpm_guard_register(on_fire, "watchdog == WD_FIRED");

Both passes share one scanner; they are registered separately so that each
keeps its own pipeline stage and identifier.
"""

from __future__ import annotations

from dataclasses import dataclass

from .pipeline import ExtensionId, ExtensionPass
from .rewrite import COMPOUND_OPS, VarTarget, rewrite_line
from .srcmodel import (
    Diagnostic,
    SourceUnit,
    TokenKind,
    apply_spans,
    significant,
    tokenize_line,
    unit_from_raws,
)

REFRACTIVE_ID = ExtensionId("refractive", "0.5")
ARRAY_ID = ExtensionId("array", "0.5")

_DECL_KEYWORDS = {"sensor_t": "sensor", "actuator_t": "actuator", "context_t": "both"}

BUILTIN_ARRAY_PROPS = ("beacons", "silent_periods", "stale")


@dataclass(frozen=True)
class ContextVarSpec:
    name: str
    direction: str  # "sensor" | "actuator" | "both"
    binding: str
    value_type: str = "int"


@dataclass(frozen=True)
class ReflectiveArraySpec:
    name: str
    key_kind: str = "string"
    properties: tuple = ()  # (prop_name, value_type) pairs


@dataclass(frozen=True)
class GuardedFunctionSpec:
    guard_expr: str
    body_fn: str


def _read_call(name):
    return f"cpm_ctx_read({name})"


def _write_stmt(name, value):
    return f"cpm_ctx_write({name}, {value});"


def _merge_direction(a, b):
    return a if a == b else "both"


def _config_scalars(config, diags, emitted_by):
    specs: dict[str, ContextVarSpec] = {}
    for key, direction in (("sensors", "sensor"), ("actuators", "actuator"), ("context", "both")):
        entries = config.get("refractive", key)
        if not entries:
            continue
        for item in str(entries).split(","):
            item = item.strip()
            if not item:
                continue
            name, _, vtype = item.partition(":")
            name = name.strip()
            vtype = vtype.strip() or "int"
            if name in specs:
                direction = _merge_direction(specs[name].direction, direction)
                diags.append(
                    Diagnostic("warning", 0, f"context variable '{name}' configured with two directions; treating as both", emitted_by)
                )
            specs[name] = ContextVarSpec(name, direction, binding=name, value_type=vtype)
    return specs


def _config_arrays(config, diags, emitted_by):
    specs: dict[str, ReflectiveArraySpec] = {}
    names = config.get("array", "arrays")
    if not names:
        return specs
    for name in str(names).split(","):
        name = name.strip()
        if not name:
            continue
        props = []
        prop_text = config.get("array", name)
        if prop_text:
            for item in str(prop_text).split(","):
                item = item.strip()
                if not item:
                    continue
                pname, _, ptype = item.partition(":")
                props.append((pname.strip(), ptype.strip() or "int"))
        specs[name] = ReflectiveArraySpec(name=name, properties=tuple(props))
    return specs


def _match_scalar_decl(tokens, seg):
    toks = [tokens[i] for i in seg]
    if not toks or toks[0].lexeme not in _DECL_KEYWORDS:
        return None
    if toks[-1].lexeme != ";" or len(toks) < 4:
        return None
    head = toks[1:-1]
    name_tok = head[-1]
    if name_tok.kind is not TokenKind.IDENTIFIER:
        return None
    type_toks = head[:-1]
    if not type_toks:
        return None
    for t in type_toks:
        if t.kind not in (TokenKind.KEYWORD, TokenKind.IDENTIFIER) and t.lexeme != "*":
            return None
    return {
        "direction": _DECL_KEYWORDS[toks[0].lexeme],
        "name": name_tok.lexeme,
        "type_text": " ".join(t.lexeme for t in type_toks),
        "start": toks[0].column,
        "end": toks[-1].end,
    }


def _match_array_decl(tokens, seg):
    toks = [tokens[i] for i in seg]
    if len(toks) < 5 or toks[0].lexeme != "reflective_array_t":
        return None
    if toks[1].kind is not TokenKind.IDENTIFIER:
        return None
    if toks[2].lexeme != "{" or toks[-1].lexeme != ";" or toks[-2].lexeme != "}":
        return None
    props = []
    body = toks[3:-2]
    i = 0
    while i < len(body):
        if body[i].kind is not TokenKind.IDENTIFIER:
            return None
        pname = body[i].lexeme
        if i + 2 >= len(body) + 1 or i + 1 >= len(body) or body[i + 1].lexeme != ":":
            return None
        if i + 2 >= len(body) or body[i + 2].kind not in (TokenKind.IDENTIFIER, TokenKind.KEYWORD):
            return None
        props.append((pname, body[i + 2].lexeme))
        i += 3
        if i < len(body):
            if body[i].lexeme != ",":
                return None
            i += 1
    if not props or len({p for p, _ in props}) != len(props):
        return None
    return {
        "name": toks[1].lexeme,
        "properties": tuple(props),
        "start": toks[0].column,
        "end": toks[-1].end,
    }


def _match_guard_decl(raw, tokens, seg):
    toks = [tokens[i] for i in seg]
    if len(toks) < 6 or toks[0].lexeme != "guard_t" or toks[1].lexeme != "(":
        return None
    depth = 0
    close = None
    for j, t in enumerate(toks[1:], start=1):
        if t.lexeme == "(":
            depth += 1
        elif t.lexeme == ")":
            depth -= 1
            if depth == 0:
                close = j
                break
    # shape: guard_t ( expr ) fn ;
    if close is None or close + 2 != len(toks) - 1:
        return None
    fn_tok = toks[close + 1]
    if fn_tok.kind is not TokenKind.IDENTIFIER or toks[-1].lexeme != ";":
        return None
    expr = raw[toks[1].end : toks[close].column].strip()
    if not expr:
        return None
    return {
        "fn": fn_tok.lexeme,
        "expr": expr,
        "start": toks[0].column,
        "end": toks[-1].end,
    }


def scan_context(unit: SourceUnit, config, skip=frozenset(), families=("scalar", "array", "guard")):
    """Collect context declarations (from config and from the source) and
    replace in-source declaration lines with runtime registration calls.

    Guards are validated after the whole unit is seen, so a guard may precede
    the sensors it references. Returns
    (unit, scalar_specs, array_specs, guard_specs, diagnostics).
    """
    emitted_by = str(REFRACTIVE_ID if "scalar" in families else ARRAY_ID)
    diags: list[Diagnostic] = []
    scalars = _config_scalars(config, diags, emitted_by) if "scalar" in families else {}
    arrays = _config_arrays(config, diags, emitted_by) if "array" in families else {}
    guards: list[GuardedFunctionSpec] = []
    pending_guards = []  # (line_index, seg match dict, line_no)
    line_spans: dict[int, list] = {}

    for idx, line in enumerate(unit.lines):
        if line.line_no in skip or line.in_block_comment:
            continue
        sig = significant(line.tokens)
        p = 0
        while p < len(sig):
            tok = line.tokens[sig[p]]
            family = None
            if tok.kind is TokenKind.IDENTIFIER:
                if "scalar" in families and tok.lexeme in _DECL_KEYWORDS:
                    family = "scalar"
                elif "array" in families and tok.lexeme == "reflective_array_t":
                    family = "array"
                elif "guard" in families and tok.lexeme == "guard_t":
                    family = "guard"
            if family is None:
                p += 1
                continue
            at_start = p == 0 or line.tokens[sig[p - 1]].lexeme in (";", "{", "}")
            end_p = next(
                (q for q in range(p, len(sig)) if line.tokens[sig[q]].lexeme == ";"), None
            )
            if not at_start or end_p is None:
                diags.append(
                    Diagnostic("warning", line.line_no, f"unrecognized {tok.lexeme} declaration form; line passed through", emitted_by)
                )
                p = p + 1 if end_p is None else end_p + 1
                continue
            seg = sig[p : end_p + 1]
            if family == "scalar":
                m = _match_scalar_decl(line.tokens, seg)
            elif family == "array":
                m = _match_array_decl(line.tokens, seg)
            else:
                m = _match_guard_decl(line.raw, line.tokens, seg)
            if m is None:
                diags.append(
                    Diagnostic("warning", line.line_no, f"unrecognized {tok.lexeme} declaration form; line passed through", emitted_by)
                )
                p = end_p + 1
                continue
            if family == "scalar":
                direction = m["direction"]
                if m["name"] in scalars:
                    direction = _merge_direction(scalars[m["name"]].direction, direction)
                    diags.append(
                        Diagnostic("warning", line.line_no, f"context variable '{m['name']}' declared more than once; directions merged", emitted_by)
                    )
                scalars[m["name"]] = ContextVarSpec(
                    m["name"], direction, binding=m["name"], value_type=m["type_text"]
                )
                text = f'cpm_ctx_register({m["name"]}, {direction}, "{m["name"]}");'
                line_spans.setdefault(idx, []).append((m["start"], m["end"], text))
            elif family == "array":
                if m["name"] in arrays:
                    diags.append(
                        Diagnostic("warning", line.line_no, f"reflective array '{m['name']}' declared more than once; first declaration wins", emitted_by)
                    )
                else:
                    arrays[m["name"]] = ReflectiveArraySpec(name=m["name"], properties=m["properties"])
                text = f"cpm_arr_register({m['name']});"
                line_spans.setdefault(idx, []).append((m["start"], m["end"], text))
            else:
                pending_guards.append((idx, m, line.line_no))
            p = end_p + 1

    sensor_names = {s.name for s in scalars.values() if s.direction in ("sensor", "both")}
    for idx, m, line_no in pending_guards:
        refs = {
            t.lexeme
            for t in tokenize_line(m["expr"])
            if t.kind is TokenKind.IDENTIFIER
        }
        if not refs & sensor_names:
            diags.append(
                Diagnostic("warning", line_no, f"guard for '{m['fn']}' references no declared sensor; guard dropped", emitted_by)
            )
            continue
        guards.append(GuardedFunctionSpec(guard_expr=m["expr"], body_fn=m["fn"]))
        expr = m["expr"].replace("\\", "\\\\").replace('"', '\\"')
        text = f'cpm_guard_register({m["fn"]}, "{expr}");'
        line_spans.setdefault(idx, []).append((m["start"], m["end"], text))

    raws = []
    for idx, line in enumerate(unit.lines):
        spans = line_spans.get(idx)
        raws.append(apply_spans(line.raw, spans) if spans else line.raw)
    out = unit_from_raws(raws, origin=unit.origin, final_newline=unit.final_newline)
    return out, list(scalars.values()), list(arrays.values()), guards, diags


def lower_context_accesses(unit: SourceUnit, specs, skip=frozenset()):
    """Wrap sensor reads and actuator writes of the declared scalar context
    variables. Returns (unit, diagnostics)."""
    diags: list[Diagnostic] = []
    targets = {}
    for s in specs:
        targets[s.name] = VarTarget(
            s.name,
            read=_read_call if s.direction in ("sensor", "both") else None,
            write=_write_stmt if s.direction in ("actuator", "both") else None,
        )
    if not targets:
        return unit, diags
    raws = []
    for line in unit.lines:
        if line.line_no in skip or line.in_block_comment:
            raws.append(line.raw)
            continue
        raws.append(
            rewrite_line(line.raw, line.tokens, targets, line.line_no, str(REFRACTIVE_ID), diags)
        )
    out = unit_from_raws(raws, origin=unit.origin, final_newline=unit.final_newline)
    return out, diags


def lower_array_accesses(unit: SourceUnit, specs, skip=frozenset()):
    """Rewrite ``A[key].prop`` accesses of declared reflective arrays into
    ``cpm_arr_get(A, (key), prop)``. Returns (unit, diagnostics)."""
    diags: list[Diagnostic] = []
    by_name = {s.name: s for s in specs}
    if not by_name:
        return unit, diags
    raws = []
    for line in unit.lines:
        if line.line_no in skip or line.in_block_comment:
            raws.append(line.raw)
            continue
        raws.append(_lower_array_line(line, by_name, diags))
    out = unit_from_raws(raws, origin=unit.origin, final_newline=unit.final_newline)
    return out, diags


def _lower_array_line(line, by_name, diags):
    tokens = line.tokens
    sig = significant(tokens)
    spans = []
    p = 0
    while p < len(sig):
        tok = tokens[sig[p]]
        if tok.kind is not TokenKind.IDENTIFIER or tok.lexeme not in by_name:
            p += 1
            continue
        if p + 1 >= len(sig) or tokens[sig[p + 1]].lexeme != "[":
            p += 1
            continue
        spec = by_name[tok.lexeme]
        open_br = sig[p + 1]
        depth = 0
        close_at = None
        q = p + 1
        while q < len(sig):
            lex = tokens[sig[q]].lexeme
            if lex == "[":
                depth += 1
            elif lex == "]":
                depth -= 1
                if depth == 0:
                    close_at = q
                    break
            q += 1
        if close_at is None:
            diags.append(
                Diagnostic("warning", line.line_no, f"'{tok.lexeme}[' access does not close on this line; left unrewritten", str(ARRAY_ID))
            )
            p += 1
            continue
        if close_at + 2 >= len(sig) or tokens[sig[close_at + 1]].lexeme != ".":
            diags.append(
                Diagnostic("warning", line.line_no, f"'{tok.lexeme}[...]' without a property selector; left unrewritten", str(ARRAY_ID))
            )
            p = close_at + 1
            continue
        prop_tok = tokens[sig[close_at + 2]]
        if prop_tok.kind is not TokenKind.IDENTIFIER:
            diags.append(
                Diagnostic("warning", line.line_no, f"'{tok.lexeme}[...].' not followed by a property name; left unrewritten", str(ARRAY_ID))
            )
            p = close_at + 1
            continue
        known = {name for name, _ in spec.properties} | set(BUILTIN_ARRAY_PROPS)
        if prop_tok.lexeme not in known:
            diags.append(
                Diagnostic("warning", line.line_no, f"unknown property '{prop_tok.lexeme}' of reflective array '{tok.lexeme}'; left unrewritten", str(ARRAY_ID))
            )
            p = close_at + 3
            continue
        after = tokens[sig[close_at + 3]] if close_at + 3 < len(sig) else None
        if after is not None and (after.lexeme == "=" or after.lexeme in COMPOUND_OPS):
            diags.append(
                Diagnostic("warning", line.line_no, f"assignment to reflective array property '{tok.lexeme}[...].{prop_tok.lexeme}' is unsupported; left unrewritten", str(ARRAY_ID))
            )
            p = close_at + 3
            continue
        key_text = line.raw[tokens[open_br].end : tokens[sig[close_at]].column].strip()
        spans.append(
            (tok.column, prop_tok.end, f"cpm_arr_get({tok.lexeme}, ({key_text}), {prop_tok.lexeme})")
        )
        p = close_at + 3
    return apply_spans(line.raw, spans)


class RefractivePass(ExtensionPass):
    """Scalar context variables and guarded functions."""

    id = REFRACTIVE_ID
    KNOWN_KEYS = frozenset({"sensors", "actuators", "context"})
    KEYWORDS = frozenset({"sensor_t", "actuator_t", "context_t", "guard_t"})

    def _transform(self, unit, config, skip):
        unit, scalars, _, _, diags = scan_context(unit, config, skip, families=("scalar", "guard"))
        unit, more = lower_context_accesses(unit, scalars, skip)
        return unit, diags + more


class ArrayPass(ExtensionPass):
    """Reflective (string-indexed, dynamically growing) context arrays."""

    id = ARRAY_ID
    KEYWORDS = frozenset({"reflective_array_t"})

    def known_key(self, key: str) -> bool:
        if key == "arrays":
            return True
        # per-array property lists live under the array's own name
        return bool(key) and "." not in key

    def _transform(self, unit, config, skip):
        unit, _, arrays, _, diags = scan_context(unit, config, skip, families=("array",))
        unit, more = lower_array_accesses(unit, arrays, skip)
        return unit, diags + more
