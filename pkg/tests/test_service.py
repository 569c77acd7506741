
import random

import pytest

from src.core.errors import ConditionNotMet, DyckConfigurationError, ParameterError, ResourceLimitError
from src.core.graph import CodeParams, Ranking
from src.core.schemas import FrameDocument, ProfileDocument, RankingDocument
from src.core.service import RankModService, get_service, read_json
from src.engines.systematic_engine import FIRSTNODE, FULL, SELFLOOP, SYSTEMATIC, information_set

from .conftest import EXAMPLE_OUTPUT, load_data


@pytest.fixture
def service():
    return RankModService()


@pytest.fixture
def frame_doc():
    return FrameDocument.model_validate(load_data("example_frame.json"))


@pytest.fixture
def ranking_doc():
    return RankingDocument.model_validate(load_data("example_ranking.json"))


def test_singleton():
    assert get_service() is get_service()


def test_frame_cache(service, frame_doc):
    params = CodeParams.create(4, 2)
    assert service.get_frame(params, frame_doc) is service.get_frame(params, frame_doc)
    assert service.get_frame(params) is not service.get_frame(params, frame_doc)
    with pytest.raises(ParameterError):
        service.get_frame(CodeParams.create(3, 2), frame_doc)


def test_encode_example(service, frame_doc, ranking_doc):
    profile = service.encode(ranking_doc, SYSTEMATIC, frame_doc)
    assert profile.counts == EXAMPLE_OUTPUT
    assert profile.mode == SYSTEMATIC
    assert (profile.frame.alpha, profile.frame.euler) == (frame_doc.alpha, frame_doc.euler)


def test_decode_uses_embedded_frame(service, frame_doc, ranking_doc):
    profile = service.encode(ranking_doc, SYSTEMATIC, frame_doc)
    decoded = RankModService().decode(ProfileDocument.model_validate_json(profile.dumps()))
    assert decoded.ranks == ranking_doc.ranks


def test_encode_document_is_byte_stable(service, frame_doc, ranking_doc):
    first = service.encode(ranking_doc, SYSTEMATIC, frame_doc).dumps()
    second = RankModService().encode(ranking_doc, SYSTEMATIC, frame_doc).dumps()
    assert first == second


def test_encode_rejects_bad_requests(service, ranking_doc):
    with pytest.raises(ParameterError):
        service.encode(ranking_doc, "hamiltonian")
    with pytest.raises(ParameterError):
        service.encode(ranking_doc, SELFLOOP)


def test_encode_full_condition_not_met(service):
    doc = RankingDocument.model_validate(load_data("pi_allnodes_not_necessary.json"))
    with pytest.raises(ConditionNotMet):
        service.encode(doc, FULL)
    assert service.vertex_order(doc) is None


def test_full_decode_returns_whole_ranking(service):
    doc = ProfileDocument.model_validate(load_data("example_profile.json"))
    ranking = service.decode(doc, FULL)
    assert len(ranking.ranks) == 16
    assert ranking.ranks["AC"] == 0


def test_feasible(service):
    profile = ProfileDocument.model_validate(load_data("example_profile.json"))
    assert service.feasible(profile).feasible
    infeasible = RankingDocument.model_validate(load_data("pi_infeasible.json"))
    assert not service.feasible(infeasible).feasible
    allnodes = RankingDocument.model_validate(load_data("pi_allnodes_not_necessary.json"))
    result = service.feasible(allnodes)
    assert result.feasible
    assert len(result.witness.counts) == 16


def test_check_dyck(service):
    profile = ProfileDocument.model_validate(load_data("example_profile.json"))
    report = service.check_dyck(profile)
    assert report.passes
    assert len(report.cuts) == 4
    cut = next(c for c in report.cuts if c.vertices == ["A"])
    assert cut.word == "100101"


def test_enumerate_binary(service, tmp_path):
    output = tmp_path / "feasible.jsonl"
    doc = service.enumerate(CodeParams.create(2, 2), output=output)
    assert (doc.count, doc.total, doc.condition) == (0, 24, "feasible")
    assert output.read_text(encoding="utf-8") == ""


def test_sizes(service):
    doc = service.sizes(CodeParams.create(4, 2))
    assert doc.systematic == 6227020800
    assert doc.rates["firstnode"] == "0.824"
    assert doc.reference_note
    assert doc.bounds["lower"] == "136"
    assert "reduced_upper" not in doc.bounds
    assert service.sizes(CodeParams.create(4, 2), reduced=True).bounds["reduced_upper"] == "6272"
    assert service.sizes(CodeParams.create(5, 2)).reference_note is None


def test_profile_documents(service):
    doc = service.profile("ACGT", 2)
    assert doc.counts["AC"] == 1 and doc.counts["AA"] == 0
    single = service.profile("AAC", 1)
    assert single.counts == {"A": 2, "C": 1}
    custom = service.profile("XYYX", 2, "XY")
    assert custom.alphabet == "XY"
    assert custom.counts == {"XX": 1, "XY": 1, "YX": 1, "YY": 1}


def test_verify_example(service, frame_doc, ranking_doc):
    expected = ProfileDocument.model_validate(load_data("example_profile.json"))
    report = service.verify(
        CodeParams.create(4, 2), frame_doc=frame_doc, ranking_doc=ranking_doc, expected=expected
    )
    assert report.ok
    assert report.samples == 1
    assert report.cases[0].matches_expected is True
    assert report.cases[0].length == 1440


@pytest.mark.parametrize("mode", [SYSTEMATIC, SELFLOOP, FIRSTNODE])
def test_verify_random_samples(service, mode):
    report = service.verify(CodeParams.create(4, 2), mode=mode, samples=10, seed=1)
    assert report.ok
    assert report.samples == 10
    assert report.failures == 0


def test_verify_reduced(service):
    report = service.verify(CodeParams.create(4, 2), samples=5, reduced=True)
    assert report.ok


def test_verify_rejects_full(service):
    with pytest.raises(ParameterError):
        service.verify(CodeParams.create(4, 2), mode=FULL)


def test_read_json_errors(tmp_path):
    with pytest.raises(ParameterError):
        read_json(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    with pytest.raises(ParameterError):
        read_json(broken)


def dyck_first_node_ranking(frame):
    """首顶点的入边全部排在出边之前"""
    graph = frame.graph
    incoming, outgoing = graph.cut_edges([frame.vertices[0]])
    head = list(incoming) + list(outgoing)
    domain = information_set(frame, FIRSTNODE)
    return Ranking(frame.params, tuple(head + [e for e in domain if e not in head]))


def test_verify_given_dyck_ranking_raises(service, frame_doc):
    params = CodeParams.create(4, 2)
    frame = service.get_frame(params, frame_doc)
    doc = RankingDocument.from_ranking(dyck_first_node_ranking(frame))
    with pytest.raises(DyckConfigurationError) as info:
        service.verify(params, frame_doc=frame_doc, ranking_doc=doc, mode=FIRSTNODE)
    assert info.value.word == "000111"


def test_first_node_loop_ranks_decode_without_flag(service, frame_doc):
    params = CodeParams.create(4, 2)
    frame = service.get_frame(params, frame_doc)
    graph = frame.graph
    loops = graph.self_loops()
    domain = [e for e in information_set(frame, FIRSTNODE) if e not in loops]
    rng = random.Random(8)
    while True:
        rng.shuffle(domain)
        loop_ranks = dict(zip(loops, rng.sample(range(params.n_edges), len(loops))))
        doc = RankingDocument.from_ranking(Ranking(params, tuple(domain)), loop_ranks)
        try:
            profile = service.encode(doc, FIRSTNODE, frame_doc)
        except DyckConfigurationError:
            continue
        break
    assert profile.split_loops is True
    decoded = RankModService().decode(ProfileDocument.model_validate_json(profile.dumps()))
    assert decoded.ranks == doc.ranks
    assert decoded.loop_ranks == doc.loop_ranks
    assert service.encode(RankingDocument.model_validate(load_data("example_ranking.json"))).split_loops is None


def test_frame_alphabet_is_checked(service, frame_doc):
    params = CodeParams.create(4, 2)
    foreign = frame_doc.model_copy(update={"alphabet": "WXYZ"})
    with pytest.raises(ParameterError):
        service.get_frame(params, foreign)


def test_custom_alphabet_round_trip(service, ranking_doc):
    table = str.maketrans("ACGT", "WXYZ")
    doc = RankingDocument(
        q=4, l=2, alphabet="WXYZ", ranks={g.translate(table): r for g, r in ranking_doc.ranks.items()}
    )
    profile = service.encode(doc)
    assert profile.frame.alphabet == "WXYZ"
    decoded = RankModService().decode(ProfileDocument.model_validate_json(profile.dumps()))
    assert decoded.ranks == doc.ranks


def test_enumerate_limit_leaves_no_file(service, tmp_path):
    output = tmp_path / "feasible.jsonl"
    with pytest.raises(ResourceLimitError):
        service.enumerate(CodeParams.create(4, 2), output=output)
    assert not output.exists()


@pytest.mark.slow
def test_enumerate_streams_to_file(service, tmp_path):
    output = tmp_path / "feasible.jsonl"
    doc = service.enumerate(CodeParams.create(3, 2), parallel=2, output=output)
    lines = output.read_text(encoding="utf-8").splitlines()
    assert doc.count == len(lines) == 30240
    first = RankingDocument.model_validate_json(lines[0])
    assert len(first.ranks) == 9
