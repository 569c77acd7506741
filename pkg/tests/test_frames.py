import pytest

from src.core.errors import FrameError, ParameterError
from src.core.frames import (
    build_frame,
    de_bruijn_digits,
    default_hamiltonian,
    eulerian_extension,
    frame_from_strings,
    frame_to_strings,
    is_de_bruijn_sequence,
    lyndon_words,
    standard_delta,
    tie_break_cycle,
    validate_frame,
)
from src.core.graph import CodeParams, DeBruijnGraph


def test_lyndon_words():
    assert list(lyndon_words(2, 3)) == [(0,), (0, 0, 1), (0, 1, 1), (1,)]


@pytest.mark.parametrize("q,n", [(2, 3), (3, 2), (4, 1), (4, 3), (5, 2)])
def test_fkm_sequence_is_de_bruijn(q, n):
    digits = de_bruijn_digits(q, n)
    assert is_de_bruijn_sequence(digits, n, q)


def test_is_de_bruijn_sequence_rejects():
    assert not is_de_bruijn_sequence([0, 0, 1], 2, 2)
    assert not is_de_bruijn_sequence([0, 1, 0, 1], 2, 2)


def test_default_frame(default_frame):
    frame = default_frame
    params = frame.params
    graph = DeBruijnGraph(params)
    assert len(frame.alpha) == params.n_vertices
    assert len(frame.alpha) + len(frame.beta) == params.n_edges
    assert sorted(frame.alpha + frame.beta) == list(graph.edges())
    assert sorted(frame.vertices) == list(graph.vertices())
    assert frame.delta == standard_delta(params)
    assert frame.scale == 2 * frame.delta
    assert len(frame.gammas) == params.n_vertices - 1
    for i, gamma in enumerate(frame.gammas):
        assert gamma[0] == frame.alpha[i]
        assert graph.dest(gamma[-1]) == graph.src(gamma[0])


def test_standard_delta():
    assert standard_delta(CodeParams.create(4, 2)) == 7
    assert standard_delta(CodeParams.create(3, 3)) == 37


def test_default_hamiltonian_q3():
    params = CodeParams.create(3, 2)
    graph = DeBruijnGraph(params)
    assert graph.spell(default_hamiltonian(params)) == "ACG"


def test_default_hamiltonian_starts_loop_free():
    params = CodeParams.create(3, 3)
    graph = DeBruijnGraph(params)
    assert graph.spell(default_hamiltonian(params)) == "ACAGCCGGA"


@pytest.mark.parametrize("q,ell", [(3, 3), (4, 3), (3, 4)])
def test_default_first_vertex_has_full_cut(q, ell):
    frame = build_frame(CodeParams.create(q, ell))
    graph = frame.graph
    v0 = frame.vertices[0]
    assert all(graph.src(e) != v0 for e in graph.self_loops())
    incoming, outgoing = graph.cut_edges([v0])
    assert (len(incoming), len(outgoing)) == (q, q)


def test_example_frame(example_frame):
    graph = example_frame.graph
    assert [graph.vertex_name(v) for v in example_frame.vertices] == ["A", "G", "T", "C"]
    assert graph.spell(example_frame.beta) == "AACCTTATGGCG"
    assert example_frame.delta == 7

    span, gamma = tie_break_cycle(example_frame, 0)
    assert span == (8, 11)
    assert [graph.edge_name(e) for e in gamma] == ["AG", "GG", "GC", "CG", "GA"]
    assert tie_break_cycle(example_frame, 1)[0] == (4, 7)
    assert tie_break_cycle(example_frame, 2)[0] == (2, 3)
    with pytest.raises(FrameError):
        tie_break_cycle(example_frame, 3)


def test_frame_string_round_trip(example_frame):
    assert frame_to_strings(example_frame) == ("AGTC", "AGTCAACCTTATGGCG")


def test_frame_rejects_bad_strings(dna2):
    with pytest.raises(FrameError):
        frame_from_strings(dna2, "AGT", "AGTCAACCTTATGGCG")
    with pytest.raises(FrameError):
        frame_from_strings(dna2, "AGTC", "AACCAGTCTTATGGCG")
    with pytest.raises(FrameError):
        # 重复经过 G
        frame_from_strings(dna2, "AGGC", "AGGCAACCTTATGTCG")
    with pytest.raises(FrameError):
        frame_from_strings(dna2, "AGTC", "AGTCAACCTTATGGCA")


def test_eulerian_extension_continues_alpha(dna2):
    alpha = default_hamiltonian(dna2)
    beta = eulerian_extension(dna2, alpha)
    graph = DeBruijnGraph(dna2)
    assert graph.src(beta[0]) == graph.src(alpha[0])
    assert not set(alpha) & set(beta)


def test_reduced_frame(dna2):
    frame = build_frame(dna2, reduced=True)
    graph = frame.graph
    assert frame.reduced
    assert frame.delta == 4
    assert frame.spans == ()
    for i, gamma in enumerate(frame.gammas):
        assert gamma == (frame.alpha[i], graph.reverse_edge(frame.alpha[i]))
    with pytest.raises(ParameterError):
        build_frame(CodeParams.create(3, 3), reduced=True)


def test_validate_frame_rejects_wrong_delta(example_frame):
    broken = type(example_frame)(
        example_frame.params,
        example_frame.alpha,
        example_frame.beta,
        example_frame.gammas,
        delta=5,
        spans=example_frame.spans,
    )
    with pytest.raises(FrameError):
        validate_frame(broken)


def test_binary_alphabet_rejected():
    with pytest.raises(ParameterError):
        build_frame(CodeParams.create(2, 3))
