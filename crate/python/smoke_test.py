"""Smoke test for the `odem` extension module.

Build first:  cargo build --release -p odem-py --features extension-module
Then run:     python3 python/smoke_test.py
"""

import importlib.util
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import odem  # noqa: F401 installed into the environment

        return odem
    except ImportError:
        pass
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libodem.so"
        if lib.exists():
            tmp = pathlib.Path(tempfile.mkdtemp()) / "odem.so"
            shutil.copy(lib, tmp)
            spec = importlib.util.spec_from_file_location("odem", tmp)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            return module
    sys.exit("libodem.so not found; build the odem-py crate first")


def main():
    odem = load()

    t = odem.tanh("1/2", 80)
    assert abs(t.center_float - 0.46211715726000974) < 1e-15, t
    assert t.radius_float < 2.0**-70

    assert "xi" in odem.functions()
    s = odem.eval_fn("lambda", "0.5", m=4, n=2)
    assert s["pass"] is True, s
    s = odem.eval_fn("relu", -3, m=3)
    assert abs(s["value"].center_float) <= 2.0**-3

    doubling = (ROOT / "data" / "systems" / "doubling.ode").read_text()
    (f,) = odem.solve(doubling, 10, ["3"])
    assert f.center_float == 3072.0 and f.radius_float == 0.0

    assert odem.encode_word("13") == "+7p-4"

    assert "binary-increment" in odem.machines()
    r = odem.tm_compare("binary-increment", 50)
    assert all(r["within"]) and r["final"] == r["reference"], r
    r = odem.tm_compare("right-mover", 30, space=30, rounding=True)
    assert all(r["within"])

    try:
        odem.eval_fn("nope", 0, m=1)
    except ValueError:
        pass
    else:
        raise AssertionError("unknown function accepted")

    print("smoke test ok")


if __name__ == "__main__":
    main()
