"""CSV round-trips and driving the command line interface.

Samples travel as plain CSV: a grid row, an optional #weights row, one row
per curve. The same files feed the CLI, whose outputs are byte-identical
across reruns and thread counts, so artifacts can be regenerated and
diffed with confidence.
"""

import json
import pathlib
import subprocess
import sys
import tempfile

from spatialfda import Grid, KernelSpec, ProcessSpec, read_sample, sample_process, write_sample


def run_cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "spatialfda", *args],
        capture_output=True,
        text=True,
    )
    if proc.returncode != 0:
        raise RuntimeError(proc.stderr)
    return proc.stdout


def main():
    tmp = pathlib.Path(tempfile.mkdtemp(prefix="spatialfda-demo-"))
    grid = Grid.uniform(0.0, 1.0, 40)
    sample = sample_process(ProcessSpec(KernelSpec.brownian()), grid, 25, seed=1)

    path = tmp / "sample.csv"
    write_sample(path, sample, metadata={"origin": "demo 07"})
    back, meta = read_sample(path)
    print(f"wrote and re-read {len(back)} curves on {back.grid.size} points")
    print(f"round-trip exact: {(back.values == sample.values).all()}")
    print(f"metadata survived: {meta}")

    # the same file drives the CLI; two runs produce identical bytes
    out1, out2 = tmp / "depth1.csv", tmp / "depth2.csv"
    run_cli("depth", "--in", str(path), "--out", str(out1))
    run_cli("depth", "--in", str(path), "--out", str(out2), "--threads", "1")
    print(f"\ncli depth outputs byte-identical across thread counts: "
          f"{out1.read_bytes() == out2.read_bytes()}")
    print("first lines of the depth table:")
    for line in out1.read_text().splitlines()[:4]:
        print(f"  {line}")

    print("\nmedian diagnostics via the CLI (JSON to stdout):")
    report = json.loads(run_cli("quantile", "--in", str(path)))
    sol = report["solutions"][0]
    print(f"  kind={report['kind']}  converged={sol['converged']}  "
          f"iterations={sol['iterations']}  grad_norm={sol['grad_norm']:.2e}")


if __name__ == "__main__":
    main()
