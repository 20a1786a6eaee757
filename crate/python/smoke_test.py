#!/usr/bin/env python3
"""Smoke test for the opframes_py extension module.

Builds the cdylib, copies it next to this script under the importable
name, and exercises the main surface: bounds on a generated Parseval
instance, K-frame bounds against a co-isometry, a probe, and a
perturbation certificate.
"""

import json
import shutil
import subprocess
import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
ROOT = HERE.parent


def build_extension():
    subprocess.run(
        ["cargo", "build", "--release", "-p", "opframes-py"],
        cwd=ROOT,
        check=True,
    )
    built = ROOT / "target" / "release" / "libopframes_py.so"
    if not built.exists():  # macOS
        built = ROOT / "target" / "release" / "libopframes_py.dylib"
    target = HERE / "opframes_py.so"
    shutil.copyfile(built, target)


def main():
    build_extension()
    sys.path.insert(0, str(HERE))
    import opframes_py as op

    # Parseval instance: optimal bounds must be (1, 1)
    text = op.random_instance_json("parseval", k=2, n=2, count=3, seed=7)
    families, k_op = op.parse_instance_json(text)
    lower, upper, cls = families["T"].bounds()
    assert abs(lower - 1.0) < 1e-9 and abs(upper - 1.0) < 1e-9, (lower, upper)
    assert cls == "parseval", cls
    assert k_op is None

    # determinism of the generator
    assert text == op.random_instance_json("parseval", k=2, n=2, count=3, seed=7)

    # K-frame bounds against a co-isometric K equal the plain bounds
    ktext = op.random_instance_json("k-instance", k=2, n=2, count=3, seed=11)
    kfams, kk = op.parse_instance_json(ktext)
    assert kk is not None and kk.is_co_isometry(1e-10)
    plo, pup, _ = kfams["T"].bounds()
    klo, kup, is_k, unconstrained = kfams["T"].k_bounds(kk)
    assert is_k and not unconstrained
    assert abs(klo - plo) < 1e-9 * max(1.0, pup), (klo, plo)
    assert abs(kup - pup) < 1e-12 * max(1.0, pup)

    # probe brackets the spectrum
    lo, hi = kfams["T"].probe(samples=500, seed=3)
    assert plo - 1e-9 <= lo and hi <= pup + 1e-9, (lo, hi, plo, pup)

    # a derived-constant certificate on a perturbed pair is valid
    ptext = op.random_instance_json("pair", k=2, n=1, count=3, seed=5, epsilon=0.05)
    pfams, _ = op.parse_instance_json(ptext)
    cert = op.certify_min_constant(pfams["T"], pfams["R"])
    assert cert["hypothesis_ok"] and cert["valid"], json.dumps(cert, indent=2)
    assert cert["certified_lower"] <= cert["certified_upper"]

    # direct construction round trip
    ident = op.Operator.identity(2, 2)
    fam = op.Family([ident, ident])
    lo2, hi2, cls2 = fam.bounds()
    assert abs(lo2 - 2.0) < 1e-12 and abs(hi2 - 2.0) < 1e-12 and cls2 == "tight"

    print("smoke test passed")


if __name__ == "__main__":
    main()
