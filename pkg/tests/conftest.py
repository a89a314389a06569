import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # tests/oracles.py

from llmc.bench import load_suite  # noqa: E402
from llmc.lang import load  # noqa: E402

MOTIVATING = """
fn main(a: int, b: int) {
  if (a > 3) {
    if (b == a * a) {
      error("E");
    }
  }
}
"""

STRAIGHT = """
fn main(a: int) {
  let x: int = a + 1;
  return;
}
"""

CLEAN = """
fn main(a: int) {
  if (a > 3) {
    return;
  }
}
"""


@pytest.fixture(scope="session")
def suite():
    return load_suite()


@pytest.fixture
def motivating():
    return load(MOTIVATING)


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


@pytest.fixture(scope="session")
def oracle_paths(suite):
    """Exhaustive path lists for the loop-free suite programs; None for the rest."""
    from oracles import NotLoopFree, enumerate_paths

    out = {}
    for e in suite:
        try:
            out[e.name] = enumerate_paths(e.program)
        except NotLoopFree:
            out[e.name] = None
    return out
