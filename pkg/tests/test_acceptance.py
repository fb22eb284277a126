"""End-to-end gate for the checker: each test prints one summary line.

These are deliberately coarse.  The per-module suites pin behavior in
detail; this file demonstrates the headline claims (drone property
verdicts, golden trace parse, agreement with the brute-force oracle,
automaton correctness, construction laws, pipeline determinism, and
witness soundness) with explicit budgets.
"""

import itertools
import json
import random
import time

from tracemc import (
    Atom,
    Always,
    Eventually,
    Exists,
    ModelBuilder,
    Next,
    PipelineOptions,
    Until,
    accepts_word,
    build_model,
    check,
    file_source,
    ltl_to_buchi,
    parse_trace,
    run_pipeline,
    sat_states,
    to_portable,
)
from tracemc.cli import main
from tracemc.tracemodel import TraceDiagnostics

from oracle import eval_upword, oracle_sat
from strategies import (
    random_corpus,
    random_path_formula,
    random_state_formula,
    random_structure,
    render_trace,
)


def _report(name: str, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})")


def test_drone_property_table(fixtures_dir, capsys):
    started = time.perf_counter()
    rc = main(["check", "-m", str(fixtures_dir / "drone_model.json"),
               "-p", str(fixtures_dir / "drone.props"), "--json"])
    elapsed = time.perf_counter() - started
    doc = json.loads(capsys.readouterr().out)
    verdicts = [row["holds"] for row in doc["results"]]
    expected = [False, True, True, True, False, True]
    ok = verdicts == expected and rc == 1 and elapsed < 1.0
    with capsys.disabled():
        _report("drone-property-table", ok,
                f"verdicts={verdicts} rc={rc} elapsed={elapsed:.3f}s")
    assert verdicts == expected
    assert rc == 1
    assert elapsed < 1.0


def test_flight_log_golden_parse(fixtures_dir, capsys):
    diags = TraceDiagnostics()
    sequences = parse_trace(
        (fixtures_dir / "gesture_trace.log").read_text(encoding="utf-8"),
        diagnostics=diags,
    )
    left = [s for s in sequences
            if ("TAKEOFF", "LEFT") in {(r.source, r.target) for r in s.transitions}]
    right = [s for s in sequences
             if ("TAKEOFF", "RIGHT") in {(r.source, r.target) for r in s.transitions}]
    model = build_model(sequences)
    golden = (fixtures_dir / "gesture_model.json").read_text(encoding="utf-8")

    ok = (
        len(sequences) >= 2
        and left and right
        and ("index_finger_left_frames", 10) in left[0].inputs
        and ("index_finger_right_frames", 14) in right[0].inputs
        and model.states >= {"TAKEOFF", "LEFT", "RIGHT"}
        and len(model.transitions) == 2
        and to_portable(model) == golden
        and not diags.entries
    )
    with capsys.disabled():
        _report("flight-log-golden-parse", ok,
                f"sequences={len(sequences)} states={sorted(model.states)} "
                f"transitions={len(model.transitions)}")
    assert len(sequences) >= 2
    assert left and right
    assert ("index_finger_left_frames", 10) in left[0].inputs
    assert ("index_finger_right_frames", 14) in right[0].inputs
    assert model.states >= {"TAKEOFF", "LEFT", "RIGHT"}
    assert len(model.transitions) == 2
    assert to_portable(model) == golden
    assert not diags.entries


def test_checker_agrees_with_enumeration_oracle(capsys):
    rng = random.Random(0xACCE55)
    cases = 1000
    mismatches = []
    started = time.perf_counter()
    for i in range(cases):
        k = random_structure(rng, max_states=4)
        f = random_state_formula(rng, budget=2)
        got = sat_states(k, f).members
        want = oracle_sat(k, f)
        if got != want:
            mismatches.append((i, f, got, want))
    elapsed = time.perf_counter() - started
    ok = not mismatches and elapsed < 60.0
    with capsys.disabled():
        _report("checker-vs-oracle", ok,
                f"cases={cases} mismatches={len(mismatches)} elapsed={elapsed:.1f}s")
    assert not mismatches, mismatches[:3]
    assert elapsed < 60.0


def test_automata_agree_with_word_semantics(capsys):
    p, q = Atom("p"), Atom("q")
    formulas = {
        "X p": Next(p),
        "F p": Eventually(p),
        "G p": Always(p),
        "p U q": Until(p, q),
        "F G p": Eventually(Always(p)),
        "G F p": Always(Eventually(p)),
    }
    letters = [frozenset(c) for r in range(3)
               for c in itertools.combinations((p, q), r)]
    words = [
        (prefix, cycle)
        for np in range(4)
        for nc in range(1, 4)
        for prefix in itertools.product(letters, repeat=np)
        for cycle in itertools.product(letters, repeat=nc)
    ]
    checked = 0
    disagreements = []
    for name, f in formulas.items():
        aut = ltl_to_buchi(f)
        for prefix, cycle in words:
            checked += 1
            if accepts_word(aut, prefix, cycle) != eval_upword(f, prefix, cycle):
                disagreements.append((name, prefix, cycle))
    ok = not disagreements
    with capsys.disabled():
        _report("automata-word-semantics", ok,
                f"checked={checked} disagreements={len(disagreements)}")
    assert checked == 6 * 85 * 84
    assert not disagreements, disagreements[:3]


def test_model_construction_laws(capsys):
    rng = random.Random(0xA16)
    failures = []
    for i in range(100):
        corpus = random_corpus(rng)
        base = build_model(corpus)

        shuffled = list(corpus)
        rng.shuffle(shuffled)
        if build_model(shuffled) != base:
            failures.append((i, "permutation"))

        builder = ModelBuilder()
        for seq in corpus:
            builder.add_sequence(seq)
        if builder.finish() != base:
            failures.append((i, "incremental"))

        doubled = [seq for seq in corpus for _ in range(2)]
        repeated = build_model(doubled)
        if repeated != base or len(repeated.transitions) != len(base.transitions):
            failures.append((i, "dedup"))
    ok = not failures
    with capsys.disabled():
        _report("model-construction-laws", ok,
                f"corpora=100 failures={len(failures)}")
    assert not failures, failures[:5]


def test_pipeline_split_and_jobs_determinism(tmp_path, capsys):
    started = time.perf_counter()
    rng = random.Random(0x10000)
    states = [f"N{i}" for i in range(12)]
    corpus = []
    from tracemc import ExecutionSequence, TransitionRecord
    for case in range(250):
        walk = [rng.choice(states)]
        for _ in range(40):
            walk.append(rng.choice(states))
        corpus.append(ExecutionSequence(
            inputs=[("case", case)],
            initial_observations=[walk[0]],
            transitions=[TransitionRecord(walk[j], walk[j + 1], j + 1)
                         for j in range(40)],
        ))
    assert sum(len(s.transitions) for s in corpus) == 10_000

    single = tmp_path / "all.log"
    single.write_text(render_trace(corpus), encoding="utf-8")
    parts = []
    for i in range(4):
        part = tmp_path / f"part{i}.log"
        part.write_text(render_trace(corpus[i::4]), encoding="utf-8")
        parts.append(part)

    one = run_pipeline([file_source(str(single))]).model
    four = run_pipeline([file_source(str(p)) for p in parts],
                        options=PipelineOptions(jobs=4)).model
    split_same = (one.states == four.states
                  and one.transitions == four.transitions)

    props = tmp_path / "p.props"
    props.write_text("E(F current_state=N0)\nA(G(current_state=N1 -> E(X current_state=N2)))\n",
                     encoding="utf-8")
    args = ["run", "-p", str(props), "-t"] + [str(p) for p in parts]
    rc1 = main(args + ["--jobs", "1"])
    captured1 = capsys.readouterr()
    rc4 = main(args + ["--jobs", "4"])
    captured4 = capsys.readouterr()
    timing_lines = [ln for ln in (captured1.err + captured4.err).splitlines()
                    if ln.startswith("timings:")]
    elapsed = time.perf_counter() - started

    ok = (split_same and rc1 == rc4 and captured1.out == captured4.out
          and len(timing_lines) == 2 and elapsed < 10.0)
    with capsys.disabled():
        _report("pipeline-determinism", ok,
                f"states={len(one.states)} transitions={len(one.transitions)} "
                f"jobs_agree={captured1.out == captured4.out} "
                f"{timing_lines[0] if timing_lines else 'no timings'} "
                f"elapsed={elapsed:.1f}s")
    assert split_same
    assert rc1 == rc4
    assert captured1.out == captured4.out
    assert len(timing_lines) == 2
    assert elapsed < 10.0


def test_existential_witnesses_are_sound(capsys):
    rng = random.Random(0x717)
    produced = 0
    unsound = []
    for i in range(200):
        k = random_structure(rng, max_states=4)
        body = random_path_formula(rng, budget=2)
        result = check(k, Exists(body), want_witness=True)
        lasso = result.witness
        if lasso is None:
            continue
        produced += 1
        path = list(lasso.prefix) + list(lasso.cycle)
        edges = set(zip(path, path[1:]))
        edges.add((lasso.cycle[-1], lasso.cycle[0]))
        valid = (
            result.holds
            and lasso.cycle
            and set(path) <= k.states
            and edges <= k.transitions
            and path[0] in k.initial
            and eval_upword(body,
                            [k.labeling[s] for s in lasso.prefix],
                            [k.labeling[s] for s in lasso.cycle])
        )
        if not valid:
            unsound.append((i, body, lasso))
    ok = produced > 0 and not unsound
    with capsys.disabled():
        _report("witness-soundness", ok,
                f"checks=200 witnesses={produced} unsound={len(unsound)}")
    assert produced > 0
    assert not unsound, unsound[:3]
