"""Case 1 relative-error table (low-rank ground truth plus noise).

    python3 scripts/case1_table.py                      # desk scale, 40^3 rank (3,3,3)
    python3 scripts/case1_table.py scripts/configs/case1_100.json
    python3 scripts/case1_table.py --methods NLRT --noise-trials 10 scripts/configs/case1_100.json
"""

import argparse
import logging
from pathlib import Path

from nlrt.bench import BENCH_COLUMNS, ExperimentSpec, rows_as_lists, run_bench
from nlrt.fileio import write_csv

HERE = Path(__file__).resolve().parent


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("config", nargs="?", default=str(HERE / "configs" / "desk.json"))
    ap.add_argument("--methods", help="override the method list, comma-separated")
    ap.add_argument("--trials", type=int)
    ap.add_argument("--noise-trials", type=int)
    ap.add_argument("--out")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    spec = ExperimentSpec.from_json(args.config)
    if args.methods:
        spec.methods = args.methods.split(",")
    if args.trials:
        spec.trials = args.trials
    if args.noise_trials:
        spec.noise_trials = args.noise_trials
    if args.out:
        spec.out = args.out

    rows = rows_as_lists(run_bench(spec))
    width = max(len(r[0]) for r in rows)
    print(f"{'method':<{width}}  snr   mean%    std%   seconds  iters")
    for method, snr, _, mean, std, secs, iters in rows:
        print(f"{method:<{width}}  {snr:4.0f}  {100 * mean:6.3f}  {100 * std:6.3f}  {secs:7.2f}  {iters:7.1f}")
    if spec.out:
        Path(spec.out).parent.mkdir(parents=True, exist_ok=True)
        write_csv(spec.out, BENCH_COLUMNS, rows)
        print(f"wrote {spec.out}")


if __name__ == "__main__":
    main()
