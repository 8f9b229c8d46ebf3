"""Compare the numba kernels with the pure numpy / pure Python fallback.

    python benchmarks/bench_backends.py [--repeat 3]

Runs each workload in a subprocess per backend so that the
IRGCOUPLE_DISABLE_NUMBA flag is read fresh, and checks both backends
produce identical outputs.
"""
import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import hashlib, json, sys, time
import numpy as np
from irgcouple._accel import backend_name
from irgcouple.rng import UniformStream
from irgcouple.samplers import sample_er
from irgcouple.properties.clique import maximum_clique

repeat = int(sys.argv[1])
out = {"backend": backend_name()}

s = UniformStream(1)
s.uniforms(0, 1000)  # compile outside the timer
t = time.perf_counter()
for _ in range(repeat):
    u = s.uniforms(0, 10**7)
out["uniforms_1e7_s"] = (time.perf_counter() - t) / repeat
out["uniforms_digest"] = hashlib.sha256(u.tobytes()).hexdigest()

graphs = [sample_er(200, 0.5, UniformStream(2, i)) for i in range(3)]
maximum_clique(graphs[0])
t = time.perf_counter()
res = [maximum_clique(g) for g in graphs]
out["clique_G200_x3_s"] = time.perf_counter() - t
out["clique_values"] = [r.value for r in res]
out["clique_nodes"] = [r.nodes for r in res]
print(json.dumps(out))
"""


def run(disable, repeat):
    env = dict(os.environ)
    if disable:
        env["IRGCOUPLE_DISABLE_NUMBA"] = "1"
    else:
        env.pop("IRGCOUPLE_DISABLE_NUMBA", None)
    proc = subprocess.run([sys.executable, "-c", WORKLOAD, str(repeat)], env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    fast, slow = run(False, args.repeat), run(True, args.repeat)
    print(f"{'workload':<22}{'numba':>12}{'fallback':>12}{'speedup':>10}")
    for key in ("uniforms_1e7_s", "clique_G200_x3_s"):
        print(f"{key:<22}{fast[key]:>12.4f}{slow[key]:>12.4f}{slow[key] / fast[key]:>10.1f}")
    same = all(fast[k] == slow[k] for k in ("uniforms_digest", "clique_values", "clique_nodes"))
    print("outputs identical:", same)
    return 0 if same else 1


if __name__ == "__main__":
    sys.exit(main())
