import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.errors import GramError, ParameterError, WeightError
from src.core.graph import CodeParams, DeBruijnGraph, WeightMap
from src.core.sequence import (
    FASTA_WIDTH,
    infer_params,
    profile_counts,
    profile_map,
    profile_vector,
    realize_string,
    to_fasta,
)

SAMPLE = "GGGGAGAGAGGGGAAAAAAAACCCCCCCAGGGGCGCGCGCGCGCGCCCCAGCCGCCG"


def test_sample_profile():
    x = profile_vector(SAMPLE, 2)
    assert x.params.alphabet == ("A", "C", "G")
    assert x.as_ints() == [7, 1, 5, 2, 11, 8, 4, 9, 10]
    assert x.total() == len(SAMPLE)
    assert DeBruijnGraph(x.params).is_balanced(x)


def test_profile_wraps_around():
    counts = profile_counts("ACG", 2, ("A", "C", "G"))
    # AC, CG, GA (循环)
    assert counts.tolist() == [0, 1, 0, 0, 0, 1, 1, 0, 0]


def test_profile_map_single_symbols():
    assert profile_map("AACGT", 1, ("A", "C", "G", "T")) == {"A": 2, "C": 1, "G": 1, "T": 1}


def test_profile_vector_single_symbols():
    assert profile_vector("ACG", 1) == {"A": 1, "C": 1, "G": 1}
    assert profile_vector("AAT", 1) == {"A": 2, "C": 0, "G": 0, "T": 1}


def test_profile_map_names_every_gram():
    result = profile_map("ACGT", 2, ("A", "C", "G", "T"))
    assert len(result) == 16
    assert result["AC"] == 1 and result["TA"] == 1 and result["AA"] == 0


def test_infer_params():
    assert infer_params("ACGA", 2).alphabet == ("A", "C", "G")
    assert infer_params("TTT", 3).q == 4
    assert infer_params("ABE", 2).alphabet == ("A", "B", "C", "D", "E")
    with pytest.raises(GramError):
        infer_params("ac", 2)


def test_foreign_symbols_rejected():
    with pytest.raises(GramError):
        profile_counts("ACX", 2, ("A", "C", "G", "T"))
    with pytest.raises(GramError):
        profile_counts("", 2, ("A", "C"))
    with pytest.raises(ParameterError):
        profile_counts("AC", 0, ("A", "C"))
    with pytest.raises(ParameterError):
        profile_vector("ACGT", 2, CodeParams.create(4, 3))


def test_realize_example(example_output):
    s = realize_string(example_output)
    assert len(s) == example_output.total()
    assert s[0] == "A"
    assert profile_vector(s, 2, example_output.params) == example_output


def test_realize_is_deterministic(example_output):
    assert realize_string(example_output) == realize_string(example_output)


def test_realize_rejects(dna2, example_output):
    with pytest.raises(WeightError):
        realize_string(example_output.with_values({0: 0}))
    with pytest.raises(WeightError):
        realize_string(WeightMap.from_ints(dna2, range(1, 17)))


@settings(max_examples=50, deadline=None)
@given(st.text(alphabet="ACG", min_size=1, max_size=80), st.integers(min_value=2, max_value=3))
def test_profile_of_realized_string(s, ell):
    params = CodeParams.create(3, ell)
    x = profile_vector(s, ell, params)
    # 每个窗口都出现过的字符串才是合法的 profile 向量
    if not x.is_profile():
        return
    realized = realize_string(x)
    assert profile_vector(realized, ell, params) == x


def test_fasta_wraps_lines():
    s = "ACGT" * 40
    text = to_fasta(s, header="example")
    lines = text.splitlines()
    assert lines[0] == ">example"
    assert all(len(line) == FASTA_WIDTH for line in lines[1:-1])
    assert "".join(lines[1:]) == s
    assert text.endswith("\n")


def test_fasta_requires_dna():
    with pytest.raises(GramError):
        to_fasta("ABCD")
