import os
import pathlib

import pytest

import cpsforge

PROGRAMS = pathlib.Path(os.environ.get("CPSFORGE_PROGRAMS_DIR", pathlib.Path(__file__).parents[2] / "programs"))


def fixture(name):
    return (PROGRAMS / f"{name}.mcps").read_text()


def test_monads():
    assert cpsforge.monads() == ["ident", "option", "result", "nondet", "eventual", "resource"]


def test_transform_trivial():
    assert cpsforge.transform("async[ident] { 42 }") == "cps[ident] { F.pure(42) }\n"


def test_run_copy_file():
    o = cpsforge.run(fixture("copy_file"))
    assert o["result"] == "Ok 10240"
    assert o["finalizers"] == ["output", "input"]
    assert not o["failed"]


def test_queens_paths():
    assert len(cpsforge.run(fixture("nqueens"))["paths"]) == 4


def test_compare_generated():
    for monad in ["ident", "option", "result", "nondet"]:
        for seed in range(10):
            assert cpsforge.compare(cpsforge.gen_source(seed, monad, 5))["equivalent"]


def test_stats():
    assert cpsforge.stats(fixture("straight_line")) == {"awaits": 3, "binds": 17, "optimized_binds": 3}


def test_coloring():
    (v,) = cpsforge.check_coloring(fixture("color_cached"))
    assert v["verdict"] == "CachedSync"
    assert cpsforge.run(fixture("color_cached"), coloring=True)["result"] == "Some 42"


def test_callchain_visits():
    assert cpsforge.run(fixture("callchain"))["visits"] == 100
    assert cpsforge.run(fixture("callchain"), callchain=False)["visits"] == 150


def test_laws():
    for m in cpsforge.monads():
        assert cpsforge.check_monad_laws(m, 50, 3)["ok"]


def test_errors():
    with pytest.raises(cpsforge.CpsError) as e:
        cpsforge.transform("async[option] { await(ok(1)) }")
    msg, kind, line, col = e.value.args
    assert kind == "type error"
    assert (line, col) == (1, 17)
    with pytest.raises(ValueError):
        cpsforge.gen_source(0, "bogus")


def test_pretty_roundtrip():
    src = cpsforge.gen_source(5, "result", 6)
    assert cpsforge.pretty(cpsforge.pretty(src)) == cpsforge.pretty(src)
