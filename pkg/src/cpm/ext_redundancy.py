"""The ``redundancy`` pass: N-way replicated ("redundant") variables.

``redundant_t`` declarations become replica-storage definitions plus a
registration call; every later access to a declared name is lowered so that
writes are multiplexed to all replicas and reads go through the runtime's
majority vote:

    redundant_t int x;          ->  cpm_red_storage(x, int, 3);
    extern redundant_t int x;   ->  cpm_red_extern(x, int);
    x = e;                      ->  cpm_red_write(x, (e));
    ... x ...                   ->  ... cpm_red_read(x) ...
    x += e;                     ->  cpm_red_write(x, cpm_red_read(x) + (e));

Only scalars are supported; aggregates and address-taken uses are left alone
with a warning.
"""

from __future__ import annotations

from dataclasses import dataclass

from .pipeline import ExtensionId, ExtensionPass
from .rewrite import VarTarget, rewrite_line
from .srcmodel import (
    Diagnostic,
    SourceUnit,
    TokenKind,
    apply_spans,
    significant,
    split_segments,
    unit_from_raws,
)

PASS_ID = ExtensionId("redundancy", "1.1")

DEFAULT_REPLICAS = 3
DEFAULT_BANK_STRIDE = 4096


@dataclass(frozen=True)
class RedundantDecl:
    var_name: str
    base_type: str
    replicas: int  # odd, >= 3
    is_extern: bool
    decl_line: int


def _read_call(name):
    return f"cpm_red_read({name})"


def _write_stmt(name, value):
    return f"cpm_red_write({name}, {value});"


def _replica_count(config, diags):
    n = config.get_int("redundancy", "replicas", DEFAULT_REPLICAS)
    if n < 3:
        diags.append(
            Diagnostic("warning", 0, f"redundancy.replicas={n} raised to 3 (minimum for a majority)", str(PASS_ID))
        )
        n = 3
    if n % 2 == 0:
        diags.append(
            Diagnostic("warning", 0, f"redundancy.replicas={n} raised to {n + 1} (replica count must be odd)", str(PASS_ID))
        )
        n += 1
    return n


def _match_decl(tokens, seg):
    """Match ``[extern] redundant_t <type...> <name> [= init] ;`` within one
    statement segment; returns a dict of the pieces or None."""
    toks = [tokens[i] for i in seg]
    i = 0
    is_extern = False
    if toks and toks[i].lexeme == "extern":
        is_extern = True
        i += 1
    if i >= len(toks) or toks[i].lexeme != "redundant_t":
        return None
    i += 1
    head = []
    init_at = None
    semi_at = None
    for j in range(i, len(toks)):
        lex = toks[j].lexeme
        if lex == "=":
            init_at = j
            break
        if lex == ";":
            semi_at = j
            break
        head.append(toks[j])
    if init_at is not None:
        if toks[-1].lexeme != ";":
            return None
        semi_at = len(toks) - 1
    if semi_at is None or len(head) < 2:
        return None
    name_tok = head[-1]
    if name_tok.kind is not TokenKind.IDENTIFIER:
        return None
    type_toks = head[:-1]
    for t in type_toks:
        if t.kind not in (TokenKind.KEYWORD, TokenKind.IDENTIFIER) and t.lexeme != "*":
            return None
    return {
        "extern": is_extern,
        "type_text": " ".join(t.lexeme for t in type_toks),
        "name": name_tok.lexeme,
        "start": toks[0].column,
        "end": toks[semi_at].end,
        "init_span": (toks[init_at].end, toks[semi_at].column) if init_at is not None else None,
    }


def scan_redundant(unit: SourceUnit, config, skip=frozenset()):
    """Replace redundant declarations with their runtime storage/registration
    forms. Returns (unit, decls, diagnostics)."""
    diags: list[Diagnostic] = []
    replicas = _replica_count(config, diags)
    decls: list[RedundantDecl] = []
    names = set()
    raws = []
    for line in unit.lines:
        raw = line.raw
        if line.line_no in skip or line.in_block_comment:
            raws.append(raw)
            continue
        sig = significant(line.tokens)
        if not any(line.tokens[i].lexeme == "redundant_t" for i in sig):
            raws.append(raw)
            continue
        spans = []
        for seg in split_segments(line.tokens, sig):
            if not any(line.tokens[i].lexeme == "redundant_t" for i in seg):
                continue
            m = _match_decl(line.tokens, seg)
            if m is None:
                diags.append(
                    Diagnostic("warning", line.line_no, "unrecognized redundant_t declaration form; line passed through", str(PASS_ID))
                )
                continue
            if m["name"] in names:
                diags.append(
                    Diagnostic("warning", line.line_no, f"duplicate redundant declaration of '{m['name']}'; line passed through", str(PASS_ID))
                )
                continue
            names.add(m["name"])
            decls.append(
                RedundantDecl(
                    var_name=m["name"],
                    base_type=m["type_text"],
                    replicas=replicas,
                    is_extern=m["extern"],
                    decl_line=line.line_no,
                )
            )
            if m["extern"]:
                text = f"cpm_red_extern({m['name']}, {m['type_text']});"
            else:
                text = f"cpm_red_storage({m['name']}, {m['type_text']}, {replicas});"
            if m["init_span"] is not None:
                init = raw[m["init_span"][0] : m["init_span"][1]].strip()
                text += f" cpm_red_write({m['name']}, ({init}));"
                diags.append(
                    Diagnostic("info", line.line_no, f"initializer on redundant '{m['name']}' rewritten as a multiplexed write", str(PASS_ID))
                )
            spans.append((m["start"], m["end"], text))
        raws.append(apply_spans(raw, spans))
    out = unit_from_raws(raws, origin=unit.origin, final_newline=unit.final_newline)
    return out, decls, diags


def lower_accesses(unit: SourceUnit, decls, skip=frozenset()):
    """Rewrite reads/writes of the declared names into voted-read and
    multiplexed-write calls. Returns (unit, diagnostics)."""
    diags: list[Diagnostic] = []
    targets = {
        d.var_name: VarTarget(d.var_name, read=_read_call, write=_write_stmt) for d in decls
    }
    if not targets:
        return unit, diags
    raws = []
    for line in unit.lines:
        if line.line_no in skip or line.in_block_comment:
            raws.append(line.raw)
            continue
        raws.append(
            rewrite_line(line.raw, line.tokens, targets, line.line_no, str(PASS_ID), diags)
        )
    out = unit_from_raws(raws, origin=unit.origin, final_newline=unit.final_newline)
    return out, diags


class RedundancyPass(ExtensionPass):
    id = PASS_ID
    KNOWN_KEYS = frozenset({"replicas", "bank_stride"})
    KEYWORDS = frozenset({"redundant_t"})

    def _transform(self, unit, config, skip):
        unit, decls, diags = scan_redundant(unit, config, skip)
        unit, more = lower_accesses(unit, decls, skip)
        return unit, diags + more
