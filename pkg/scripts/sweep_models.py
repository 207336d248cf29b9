"""Conditional entropy and classical correlation sweeps for the reference models.

Writes one CSV per model into the output directory (default: results/).
"""
import argparse
import pathlib

from optcorr.cli import main

GRIDS = {"ising": "0:2:41", "xyx": "0:5:51", "xxz": "0:4:41"}


def run(out: pathlib.Path, L: int, strategies: str):
    out.mkdir(parents=True, exist_ok=True)
    for model, grid in GRIDS.items():
        path = out / f"sweep_{model}_L{L}.csv"
        code = main(["sweep", "--model", model, "--L", str(L), "--h", grid,
                     "--strategies", strategies, "--output", str(path)])
        print(f"{model}: {path} (exit {code})")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=pathlib.Path, default=pathlib.Path("results"))
    ap.add_argument("--L", type=int, default=12)
    ap.add_argument("--strategies", default="proj-z,sic,cic,proj-rot,sic-rot,cic-rot,cic-3par")
    args = ap.parse_args()
    run(args.out, args.L, args.strategies)
