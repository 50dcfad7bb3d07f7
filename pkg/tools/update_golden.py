"""Regenerate tests/golden/ from the current CLI. Review the diff before committing."""
import shutil
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from golden_cases import CASES, GOLDEN, GOLDEN_ALIAS, run_case  # noqa: E402


def main() -> int:
    for name in CASES:
        if name in GOLDEN_ALIAS:
            continue
        target = GOLDEN / name
        if target.exists():
            shutil.rmtree(target)
        run_case(name, target)
        print(f"wrote {target}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
