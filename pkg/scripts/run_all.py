#!/usr/bin/env python3
"""Run every experiment subcommand with desk-scale parameters.

Artifacts land in out/ (override with --output-dir). Equivalent to
``bvlab all`` but with a faster default parameter set, so the whole
suite finishes in a few minutes on a laptop.
"""

import sys

from bvlab.cli import ExperimentConfig, _COMMANDS


def main() -> int:
    cfg = ExperimentConfig()
    cfg.limit = 10**5
    cfg.x = 10**5
    cfg.hb_x = 5000
    cfg.hb_n_max = 5000
    cfg.q_max = 60
    cfg.n_max_exp = 10
    cfg.random_count = 2000
    cfg.heights = [1e4, 2e4, 4e4]
    if len(sys.argv) > 2 and sys.argv[1] == "--output-dir":
        cfg.output_dir = sys.argv[2]
    for name, fn in _COMMANDS.items():
        if name == "all":
            continue
        print(f"== {name} ==")
        fn(cfg)
    return 0


if __name__ == "__main__":
    sys.exit(main())
