import json
import sys
from pathlib import Path

import pytest

ROOT_DIR = Path(__file__).parent.parent.absolute()
sys.path.insert(0, str(ROOT_DIR))

from src.config import config
from src.core.frames import build_frame, frame_from_strings
from src.core.graph import CodeParams, DeBruijnGraph, Ranking, WeightMap

EXAMPLE_OUTPUT = {
    "AA": 127, "AC": 1, "AG": 116, "AT": 89,
    "CA": 16, "CC": 175, "CG": 59, "CT": 35,
    "GA": 115, "GC": 45, "GG": 143, "GT": 118,
    "TA": 75, "TC": 64, "TG": 103, "TT": 159,
}


def load_data(name: str) -> dict:
    return json.loads((config.DATA_DIR / name).read_text(encoding="utf-8"))


@pytest.fixture
def dna2():
    return CodeParams.create(4, 2)


@pytest.fixture
def example_frame(dna2):
    data = load_data("example_frame.json")
    return frame_from_strings(dna2, data["alpha"], data["euler"])


@pytest.fixture
def example_ranking(dna2):
    return Ranking.from_grams(dna2, load_data("example_ranking.json")["ranks"])


@pytest.fixture
def example_output(dna2):
    return WeightMap.from_grams(dna2, EXAMPLE_OUTPUT)


@pytest.fixture(params=[(3, 2), (4, 2), (3, 3)], ids=lambda p: f"q{p[0]}l{p[1]}")
def default_frame(request):
    q, ell = request.param
    return build_frame(CodeParams.create(q, ell))


def ranking_of(params: CodeParams, ranks: dict) -> Ranking:
    return Ranking.from_grams(params, ranks)


def graph_of(params: CodeParams) -> DeBruijnGraph:
    return DeBruijnGraph(params)
