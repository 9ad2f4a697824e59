"""Graphviz rendering: listening set above each state, label below, edges
marked ``y!`` for initiations and ``y?`` for reactions."""

from __future__ import annotations

from .ts import TransitionSystem, initiates, natural_key


def _quote(text: str) -> str:
    return '"' + text.replace('"', '\\"') + '"'


def _set(items) -> str:
    return "{" + ",".join(sorted(items, key=natural_key)) + "}"


def export_dot(ts: TransitionSystem) -> str:
    lines = [f"digraph {_quote(ts.name or 'ts')} {{", "  rankdir=LR;",
             '  node [shape=box, style=rounded, fontname="Helvetica"];',
             "  __start [shape=point];", f"  __start -> {_quote(ts.initial)};"]
    for s in ts.states:
        lab = ts.labelled(s)
        text = f"listen:{_set(ts.listening(s))}\\n{s}\\n{_set(lab.channels)} / {_set(lab.outputs)}"
        lines.append(f"  {_quote(s)} [label={_quote(text)}];")
    for s, y, t in ts.sorted_transitions():
        role = "!" if t in initiates(ts, s, y) else "?"
        style = "" if role == "!" else ", style=dashed"
        lines.append(f"  {_quote(s)} -> {_quote(t)} [label={_quote(y + role)}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
