"""The ``cyclic`` pass: periodically executed methods.

A function prototype tagged ``cyclic_t`` declares a cyclic method; the
pseudo-member ``Cycle`` then controls it. Assigning a period in milliseconds
starts (or re-times) the method, assigning zero cancels it; the runtime
dispatches on the value, since it is generally unknown at transform time:

    cyclic_t int Tick(TOM*);   ->  int Tick(TOM*); cpm_cycle_register(Tick);
    Tick.Cycle = 100;          ->  cpm_cycle_set(Tick, (100));
    Tick.Cycle = 0;            ->  cpm_cycle_set(Tick, (0));
    ... Tick.Cycle ...         ->  ... cpm_cycle_get(Tick) ...
"""

from __future__ import annotations

from dataclasses import dataclass

from .pipeline import ExtensionId, ExtensionPass
from .rewrite import COMPOUND_OPS
from .srcmodel import (
    Diagnostic,
    SourceUnit,
    TokenKind,
    apply_spans,
    significant,
    split_segments,
    unit_from_raws,
)

PASS_ID = ExtensionId("cyclic", "1.0")


@dataclass(frozen=True)
class CyclicMethodSpec:
    fn_name: str
    return_type: str
    param_types: str
    decl_line: int


def _match_decl(raw, tokens, seg):
    """Match ``cyclic_t <type...> <name> ( params ) ;`` within one segment."""
    toks = [tokens[i] for i in seg]
    if len(toks) < 6 or toks[0].lexeme != "cyclic_t":
        return None
    if toks[-1].lexeme != ";" or toks[-2].lexeme != ")":
        return None
    open_at = None
    for j, t in enumerate(toks):
        if t.lexeme == "(":
            open_at = j
            break
    if open_at is None or open_at < 3:
        return None
    name_tok = toks[open_at - 1]
    if name_tok.kind is not TokenKind.IDENTIFIER:
        return None
    type_toks = toks[1 : open_at - 1]
    for t in type_toks:
        if t.kind not in (TokenKind.KEYWORD, TokenKind.IDENTIFIER) and t.lexeme != "*":
            return None
    params = raw[toks[open_at].end : toks[-2].column]
    return {
        "name": name_tok.lexeme,
        "type_text": " ".join(t.lexeme for t in type_toks),
        "params": params,
        "start": toks[0].column,
        "end": toks[-1].end,
    }


def scan_cyclic(unit: SourceUnit, config, skip=frozenset()):
    """Replace cyclic prototypes with plain prototypes plus registration
    calls. Returns (unit, specs, diagnostics)."""
    diags: list[Diagnostic] = []
    specs: list[CyclicMethodSpec] = []
    names = set()
    raws = []
    for line in unit.lines:
        raw = line.raw
        if line.line_no in skip or line.in_block_comment:
            raws.append(raw)
            continue
        sig = significant(line.tokens)
        if not any(line.tokens[i].lexeme == "cyclic_t" for i in sig):
            raws.append(raw)
            continue
        spans = []
        for seg in split_segments(line.tokens, sig):
            if not any(line.tokens[i].lexeme == "cyclic_t" for i in seg):
                continue
            m = _match_decl(raw, line.tokens, seg)
            if m is None:
                diags.append(
                    Diagnostic("warning", line.line_no, "cyclic_t on something other than a function prototype; line passed through", str(PASS_ID))
                )
                continue
            proto = f"{m['type_text']} {m['name']}({m['params']});"
            if m["name"] in names:
                diags.append(
                    Diagnostic("warning", line.line_no, f"duplicate cyclic declaration of '{m['name']}'; not registered again", str(PASS_ID))
                )
                spans.append((m["start"], m["end"], proto))
                continue
            names.add(m["name"])
            specs.append(
                CyclicMethodSpec(
                    fn_name=m["name"],
                    return_type=m["type_text"],
                    param_types=m["params"],
                    decl_line=line.line_no,
                )
            )
            spans.append((m["start"], m["end"], f"{proto} cpm_cycle_register({m['name']});"))
        raws.append(apply_spans(raw, spans))
    out = unit_from_raws(raws, origin=unit.origin, final_newline=unit.final_newline)
    return out, specs, diags


def lower_cycle_member(unit: SourceUnit, specs, skip=frozenset()):
    """Rewrite ``fn.Cycle`` accesses of declared cyclic methods.
    Returns (unit, diagnostics)."""
    diags: list[Diagnostic] = []
    names = {s.fn_name for s in specs}
    raws = []
    for line in unit.lines:
        if line.line_no in skip or line.in_block_comment:
            raws.append(line.raw)
            continue
        raws.append(_lower_line(line, names, diags))
    out = unit_from_raws(raws, origin=unit.origin, final_newline=unit.final_newline)
    return out, diags


def _lower_line(line, names, diags):
    tokens = line.tokens
    sig = significant(tokens)
    spans = []
    for seg in split_segments(tokens, sig):
        # statement form: fn . Cycle = expr ;
        if len(seg) >= 5:
            t0, t1, t2, t3 = (tokens[i] for i in seg[:4])
            last = tokens[seg[-1]]
            if (
                t0.kind is TokenKind.IDENTIFIER
                and t1.lexeme == "."
                and t2.lexeme == "Cycle"
                and t3.lexeme == "="
                and last.lexeme == ";"
                and t0.lexeme in names
            ):
                rhs = line.raw[t3.end : last.column].strip()
                spans.append((t0.column, last.end, f"cpm_cycle_set({t0.lexeme}, ({rhs}));"))
                continue
        for p in range(len(seg) - 2):
            a, b, c = (tokens[seg[p + k]] for k in range(3))
            if b.lexeme != "." or c.lexeme != "Cycle" or a.kind is not TokenKind.IDENTIFIER:
                continue
            if any(start <= a.column < end for start, end, _ in spans):
                continue
            if a.lexeme not in names:
                diags.append(
                    Diagnostic("warning", line.line_no, f"'.Cycle' on '{a.lexeme}', which is not a declared cyclic method; left unrewritten", str(PASS_ID))
                )
                continue
            after = tokens[seg[p + 3]] if p + 3 < len(seg) else None
            if after is not None and (after.lexeme == "=" or after.lexeme in COMPOUND_OPS):
                diags.append(
                    Diagnostic("warning", line.line_no, f"assignment to '{a.lexeme}.Cycle' outside statement position; left unrewritten", str(PASS_ID))
                )
                continue
            spans.append((a.column, c.end, f"cpm_cycle_get({a.lexeme})"))
    return apply_spans(line.raw, spans)


class CyclicPass(ExtensionPass):
    id = PASS_ID
    KEYWORDS = frozenset({"cyclic_t"})

    def _transform(self, unit, config, skip):
        unit, specs, diags = scan_cyclic(unit, config, skip)
        unit, more = lower_cycle_member(unit, specs, skip)
        return unit, diags + more
