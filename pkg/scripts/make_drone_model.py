#!/usr/bin/env python3
"""Regenerate fixtures/drone_model.json.

The model abstracts a gesture-controlled quadcopter: the drone starts
landed, takeoff leads to the in-air gesture states, every in-air state can
land, and FIN (operator shutdown) is absorbing.  Self-loops make the
structure total so path semantics are defined.
"""

from pathlib import Path

from tracemc import KripkeStructure, to_portable
from tracemc.formula import Atom

IN_AIR = ["TAKEOFF", "UP", "LEFT", "RIGHT", "OPEN", "GAL"]
GESTURES = ["UP", "LEFT", "RIGHT", "OPEN", "GAL"]
STATES = ["LAND", "FIN"] + IN_AIR


def drone_model() -> KripkeStructure:
    transitions: set[tuple[str, str]] = set()
    transitions.add(("LAND", "TAKEOFF"))
    transitions.add(("LAND", "FIN"))
    for s in IN_AIR:
        transitions.add((s, "LAND"))
        for t in GESTURES:
            if t != s:
                transitions.add((s, t))
    for s in STATES:
        transitions.add((s, s))
    labeling = {s: {Atom(value=s, variable="current_state")} for s in STATES}
    return KripkeStructure.from_parts(
        states=STATES,
        transitions=transitions,
        labeling=labeling,
        initial=["LAND"],
    )


def main() -> None:
    out = Path(__file__).resolve().parent.parent / "fixtures" / "drone_model.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(to_portable(drone_model()), encoding="utf-8")
    model = drone_model()
    print(f"wrote {out} ({len(model.states)} states, {len(model.transitions)} transitions)")


if __name__ == "__main__":
    main()
