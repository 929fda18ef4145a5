#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Runs three representative workloads in a fresh interpreter per backend
(NULLHELIX_PURE=1 forces the fallback) and prints wall times plus speedups:

  jets    dense order-5 jet evaluation of a composite expression
  synth   flat-chart helix integration (the RK4 hot loop)
  frame   frame construction + curvature extraction along a curve

Usage: python benchmarks/bench_backends.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, time
import nullhelix
from nullhelix import exprparse, jets
from nullhelix import helix as hx
from nullhelix import nullframe as nf
from nullhelix.semimetric import MetricField

results = {"backend": nullhelix.BACKEND}

expr = exprparse.parse("sin(t)*cosh(t/2) + exp(-t^2) / (1.5 + cos(t)^2)")
start = time.perf_counter()
acc = 0.0
for i in range(20000):
    t = -3.0 + i * (6.0 / 19999)
    acc += exprparse.eval_jet(expr, {"t": jets.Jet.variable(t, 5)}).coeffs[5]
results["jets"] = time.perf_counter() - start
results["jets_checksum"] = acc

flat = MetricField.diag([-1, -1, 1])
spec = hx.HelixSpec(0.3, 1.2, -0.4, (0, 0, 0), (1, 0, 1), (-0.5, 0, 0.5),
                    (0, 1, 0), metric=flat)
grid = [i * 5.0 / 1000 for i in range(1001)]
start = time.perf_counter()
trace = hx.synthesize(spec, grid, step=1e-3)
results["synth"] = time.perf_counter() - start
results["synth_checksum"] = trace.points[-1][0]

curve = nf.NullCurve.position(flat, ["cos(t)", "sin(t)", "t"], (0.0, 6.28))
grid = [i * 6.0 / 2000 for i in range(2001)]
start = time.perf_counter()
frames = nf.frame_field(curve, grid)
ks = [nf.curvatures_at(curve, f, f.t) for f in frames]
results["frame"] = time.perf_counter() - start
results["frame_checksum"] = sum(k.k1 for k in ks)

print(json.dumps(results))
"""


def run_backend(pure: bool, repeat: int) -> dict:
    env = dict(os.environ)
    if pure:
        env["NULLHELIX_PURE"] = "1"
    else:
        env.pop("NULLHELIX_PURE", None)
    best = None
    for _ in range(repeat):
        out = subprocess.run([sys.executable, "-c", WORKLOAD], env=env,
                             capture_output=True, text=True, check=True).stdout
        res = json.loads(out)
        if best is None:
            best = res
        else:
            for key in ("jets", "synth", "frame"):
                best[key] = min(best[key], res[key])
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    pure = run_backend(pure=True, repeat=args.repeat)
    fast = run_backend(pure=False, repeat=args.repeat)
    if fast["backend"] != "compiled":
        print("compiled kernels unavailable; pure-only timings:")
        for key in ("jets", "synth", "frame"):
            print(f"  {key:6s} {pure[key] * 1e3:9.1f} ms")
        return

    for key in ("jets_checksum", "synth_checksum", "frame_checksum"):
        if pure[key] != fast[key]:
            print(f"warning: {key} differs between backends "
                  f"({pure[key]!r} vs {fast[key]!r})")

    print(f"{'workload':10s} {'pure':>10s} {'compiled':>10s} {'speedup':>9s}")
    for key in ("jets", "synth", "frame"):
        ratio = pure[key] / fast[key]
        print(f"{key:10s} {pure[key] * 1e3:8.1f}ms {fast[key] * 1e3:8.1f}ms "
              f"{ratio:8.2f}x")


if __name__ == "__main__":
    main()
