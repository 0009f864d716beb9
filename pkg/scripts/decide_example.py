#!/usr/bin/env python3
"""Decide the nonexistence criteria for the bundled example problems.

    python scripts/decide_example.py [configs/cross_powerlaw.cfg ...]
"""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from liouville_lab.config import grid_from_config, read_config, spec_from_config  # noqa: E402
from liouville_lab.criteria import decide_liouville  # noqa: E402

DEFAULTS = [
    Path(__file__).resolve().parents[1] / "configs" / "cross_powerlaw.cfg",
    Path(__file__).resolve().parents[1] / "configs" / "scalar_powerlaw.cfg",
]


def main() -> int:
    paths = [Path(p) for p in sys.argv[1:]] or DEFAULTS
    for path in paths:
        cfg = read_config(path)
        verdict = decide_liouville(spec_from_config(cfg), grid_from_config(cfg))
        print(f"== {path.name}")
        print(json.dumps(verdict.to_json_dict(), indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
