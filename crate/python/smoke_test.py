"""Smoke test for the pymjsched extension.

Build first with `cargo build -p mjsched-python --release`, then run this
script; it looks for the shared library under target/ when the module is not
already importable.
"""

import importlib.util
import pathlib
import shutil
import sys
import tempfile


def load():
    try:
        import pymjsched  # noqa: F401

        return pymjsched
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for profile in ("release", "debug"):
        lib = root / "target" / profile / "libpymjsched.so"
        if lib.exists():
            tmp = pathlib.Path(tempfile.mkdtemp())
            shutil.copy(lib, tmp / "pymjsched.so")
            spec = importlib.util.spec_from_file_location("pymjsched", tmp / "pymjsched.so")
            mod = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(mod)
            return mod
    sys.exit("pymjsched not built; run cargo build -p mjsched-python --release")


def main():
    m = load()
    assert "ra" in m.policies()

    t = m.Trace(8, [(1, 1, 1)] * 4 + [(1, 1, 2), (1, 1, 4)])
    r = m.run(t, "ra", monitors=["relaxed", "work"])
    assert r.flow_total == 8, r.flow_total
    assert all(holds for _, holds, _ in r.monitors)

    opt, schedule = m.opt_flow(t)
    assert opt == 7 and schedule.startswith("1:"), (opt, schedule)
    assert m.ratio(t, "ra") == (8, 7)

    lb = m.generate("sfa-lb", 8, t=3)
    again = m.Trace.parse(lb.to_text())
    assert again.jobs() == lb.jobs()
    assert m.run(again, "sfa").flow_total == m.run(lb, "sfa").flow_total

    weighted = m.Trace(8, [(1, 2, 1)], weighted=True)
    try:
        m.run(weighted, "ra")
    except ValueError as e:
        assert "ra" in str(e)
    else:
        raise AssertionError("ra accepted a weighted trace")

    csv = m.experiment("fig1", trials=2)
    assert csv.splitlines()[0] == "scenario,K,param,policy,trials,mean_per_job_flow"
    print("pymjsched smoke test ok")


if __name__ == "__main__":
    main()
