import random
from itertools import permutations

import pytest

from src.core.codebook import length_bounds, verify_length
from src.core.errors import InvariantViolation, ParameterError, RankingError, WeightError
from src.core.frames import build_frame
from src.core.graph import CodeParams, DeBruijnGraph, Ranking
from src.core.sequence import profile_vector, realize_string
from src.engines import systematic_engine
from src.engines.systematic_engine import (
    FIRSTNODE,
    FULL,
    SELFLOOP,
    SYSTEMATIC,
    EncodingTrace,
    SystematicEngine,
    check_loop_ranks,
    decode,
    encode_systematic,
    encode_with_self_loops,
    information_set,
    place_self_loops,
    split_loop_ranks,
)


def random_ranking(frame, mode, rng):
    domain = list(information_set(frame, mode))
    rng.shuffle(domain)
    return Ranking(frame.params, tuple(domain))


def random_loop_ranks(params, rng):
    loops = DeBruijnGraph(params).self_loops()
    return dict(zip(loops, rng.sample(range(params.n_edges), len(loops))))


def test_information_sets(example_frame):
    graph = example_frame.graph
    names = lambda edges: sorted(graph.edge_name(e) for e in edges)
    assert len(information_set(example_frame, SYSTEMATIC)) == 13
    assert "AG" not in names(information_set(example_frame, SYSTEMATIC))
    assert "CA" in names(information_set(example_frame, SYSTEMATIC))
    assert len(information_set(example_frame, SELFLOOP)) == 9
    assert len(information_set(example_frame, FIRSTNODE)) == 14
    assert "AG" in names(information_set(example_frame, FIRSTNODE))
    assert len(information_set(example_frame, FULL)) == 16


def test_example_golden(example_frame, example_ranking, example_output):
    trace = EncodingTrace()
    x = encode_systematic(example_frame, example_ranking, trace)
    assert x == example_output
    assert x.total() == 1440
    balanced = trace.balanced.to_grams()
    assert (balanced["AG"], balanced["GT"], balanced["TC"]) == (9, 9, 5)
    assert trace.scale == 14
    assert trace.seeded.to_grams()["AC"] == 1
    assert trace.output == x


def test_example_decodes(example_frame, example_ranking, example_output):
    assert decode(example_frame, example_output).ranking == example_ranking


def test_example_realizes(example_frame, example_output):
    s = realize_string(example_output)
    assert len(s) == 1440
    assert profile_vector(s, 2, example_frame.params) == example_output


def test_engine_class(example_frame, example_ranking, example_output):
    engine = SystematicEngine(example_frame)
    assert engine.encode(example_ranking) == example_output
    assert engine.decode(example_output).ranking == example_ranking
    assert engine.information_set == information_set(example_frame)


def test_wrong_domain_rejected(example_frame, example_ranking):
    graph = example_frame.graph
    ranks = example_ranking.to_mapping()
    ranks.pop(graph.edge_id("CC"))
    ranks[graph.edge_id("AG")] = 12
    with pytest.raises(RankingError):
        encode_systematic(example_frame, Ranking.from_mapping(example_frame.params, ranks))


def test_binary_alphabet_rejected():
    with pytest.raises(ParameterError):
        CodeParams.create(2, 2).require_encoder_regime()


@pytest.mark.parametrize("q,ell,samples", [(3, 2, 200), (4, 2, 200), (5, 2, 50), (3, 3, 50)])
def test_random_round_trip(q, ell, samples):
    params = CodeParams.create(q, ell)
    frame = build_frame(params)
    graph = DeBruijnGraph(params)
    bounds = length_bounds(params)
    rng = random.Random(q * 100 + ell)
    seen = set()
    inputs = set()
    for _ in range(samples):
        pi = random_ranking(frame, SYSTEMATIC, rng)
        x = encode_systematic(frame, pi)
        values = x.as_ints()
        assert graph.is_balanced(x)
        assert min(values) == 1
        assert len(set(values)) == len(values)
        assert x.total() <= bounds.upper
        assert verify_length(x)
        assert decode(frame, x).ranking == pi
        seen.add(tuple(values))
        inputs.add(pi.order)
    assert len(seen) == len(inputs)


@pytest.mark.slow
@pytest.mark.parametrize("q,ell", [(3, 2), (4, 2), (3, 3), (4, 3)])
def test_random_round_trip_through_strings(q, ell):
    params = CodeParams.create(q, ell)
    frame = build_frame(params)
    rng = random.Random(2024)
    for _ in range(1000):
        pi = random_ranking(frame, SYSTEMATIC, rng)
        x = encode_systematic(frame, pi)
        s = realize_string(x)
        assert len(s) == x.total()
        assert profile_vector(s, ell, params) == x
        assert decode(frame, x).ranking == pi


def test_reduced_frame_round_trip():
    params = CodeParams.create(4, 2)
    frame = build_frame(params, reduced=True)
    rng = random.Random(11)
    for _ in range(200):
        pi = random_ranking(frame, SYSTEMATIC, rng)
        x = encode_systematic(frame, pi)
        assert frame.graph.is_balanced(x)
        assert decode(frame, x).ranking == pi


def test_reduced_frame_is_shorter_on_example(dna2, example_frame, example_ranking, example_output):
    frame = build_frame(dna2, example_frame.alpha, example_frame.beta, reduced=True)
    x = encode_systematic(frame, example_ranking)
    assert x.total() < example_output.total()
    assert verify_length(x, reduced=True)
    assert decode(frame, x).ranking == example_ranking


def test_self_loop_round_trip(example_frame):
    params = example_frame.params
    rng = random.Random(3)
    for _ in range(200):
        pi_core = random_ranking(example_frame, SELFLOOP, rng)
        loop_ranks = random_loop_ranks(params, rng)
        x = encode_with_self_loops(example_frame, pi_core, loop_ranks)
        assert example_frame.graph.is_balanced(x)
        assert split_loop_ranks(x) == loop_ranks
        decoded = decode(example_frame, x, SELFLOOP)
        assert decoded.ranking == pi_core
        assert decoded.loop_ranks == loop_ranks


def test_self_loops_at_extremes(example_frame):
    params = example_frame.params
    graph = example_frame.graph
    pi_core = random_ranking(example_frame, SELFLOOP, random.Random(5))
    loops = graph.self_loops()
    bottom = {e: r for r, e in enumerate(loops)}
    top = {e: params.n_edges - 1 - r for r, e in enumerate(loops)}
    for loop_ranks in (bottom, top):
        x = encode_with_self_loops(example_frame, pi_core, loop_ranks)
        assert split_loop_ranks(x) == loop_ranks


def test_loop_rank_validation(dna2):
    graph = DeBruijnGraph(dna2)
    loops = graph.self_loops()
    with pytest.raises(RankingError):
        check_loop_ranks(dna2, {loops[0]: 0})
    with pytest.raises(RankingError):
        check_loop_ranks(dna2, {e: 0 for e in loops})
    with pytest.raises(RankingError):
        check_loop_ranks(dna2, {e: 16 + i for i, e in enumerate(loops)})


def test_place_self_loops_requires_integers(example_output):
    graph = DeBruijnGraph(example_output.params)
    loops = graph.self_loops()
    partial = example_output.with_values({graph.edge_id("AC"): None})
    with pytest.raises(WeightError):
        place_self_loops(partial, {e: i for i, e in enumerate(loops)})


def test_decode_rejects_non_profile(example_frame, example_output):
    with pytest.raises(WeightError):
        decode(example_frame, example_output.with_values({0: 0}))


@pytest.mark.slow
def test_systematic_code_is_injective_q3():
    params = CodeParams.create(3, 2)
    frame = build_frame(params)
    domain = information_set(frame, SYSTEMATIC)
    assert len(domain) == 7
    profiles = set()
    for order in permutations(domain):
        pi = Ranking(params, order)
        x = encode_systematic(frame, pi)
        assert decode(frame, x).ranking == pi
        profiles.add(tuple(x.as_ints()))
    assert len(profiles) == 5040


@pytest.mark.parametrize("q,ell", [(3, 2), (4, 2), (3, 3)])
def test_self_loop_outputs_within_length_bound(q, ell):
    params = CodeParams.create(q, ell)
    frame = build_frame(params)
    rng = random.Random(q + 7 * ell)
    for _ in range(50):
        x = encode_with_self_loops(frame, random_ranking(frame, SELFLOOP, rng), random_loop_ranks(params, rng))
        assert verify_length(x)


def test_self_loop_path_checks_path_bound(example_frame, monkeypatch):
    monkeypatch.setattr(systematic_engine, "path_weight_bound", lambda frame: 0)
    pi_core = random_ranking(example_frame, SELFLOOP, random.Random(1))
    loop_ranks = random_loop_ranks(example_frame.params, random.Random(1))
    with pytest.raises(InvariantViolation):
        encode_with_self_loops(example_frame, pi_core, loop_ranks)
