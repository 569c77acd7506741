"""
JSON 文档模型 (pydantic)

所有对外 JSON 只使用 gram 字符串, 不出现内部整数编号; dumps 输出按键排序, 相同输入字节级一致。
"""
import json
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from .graph import LATIN_ALPHABET, CodeParams, DeBruijnGraph, Ranking, WeightMap, default_alphabet


class Document(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    def dumps(self) -> str:
        return json.dumps(self.model_dump(by_alias=True, exclude_none=True), sort_keys=True, indent=2)


class ParamsDocument(Document):
    q: int
    ell: int = Field(alias="l")
    alphabet: Optional[str] = None

    def to_params(self) -> CodeParams:
        return CodeParams.create(self.q, self.ell, list(self.alphabet) if self.alphabet else None)


def alphabet_field(params: CodeParams) -> Optional[str]:
    """默认字母表不写入文档"""
    if params.q <= len(LATIN_ALPHABET) and default_alphabet(params.q) == params.alphabet:
        return None
    return "".join(params.alphabet)


class FrameDocument(ParamsDocument):
    """{"q":4,"l":2,"alpha":"AGTC","euler":"AGTCAACCTTATGGCG"}"""

    alpha: str
    euler: str
    reduced: bool = False


class RankingDocument(ParamsDocument):
    ranks: Dict[str, int]
    loop_ranks: Optional[Dict[str, int]] = None

    def to_ranking(self, params: Optional[CodeParams] = None) -> Ranking:
        return Ranking.from_grams(params or self.to_params(), self.ranks)

    def to_loop_ranks(self, params: Optional[CodeParams] = None) -> Optional[Dict[int, int]]:
        if self.loop_ranks is None:
            return None
        ranking_params = params or self.to_params()
        graph = DeBruijnGraph(ranking_params)
        return {graph.edge_id(g): r for g, r in self.loop_ranks.items()}

    @classmethod
    def from_ranking(cls, ranking: Ranking, loop_ranks: Optional[Dict[int, int]] = None) -> "RankingDocument":
        params = ranking.params
        loops = None
        if loop_ranks is not None:
            graph = DeBruijnGraph(params)
            loops = {graph.edge_name(e): r for e, r in loop_ranks.items()}
        return cls(q=params.q, l=params.ell, alphabet=alphabet_field(params), ranks=ranking.to_grams(), loop_ranks=loops)


class ProfileDocument(ParamsDocument):
    counts: Dict[str, int]
    mode: Optional[str] = None
    split_loops: Optional[bool] = None
    frame: Optional[FrameDocument] = None

    def to_weights(self, params: Optional[CodeParams] = None) -> WeightMap:
        return WeightMap.from_grams(params or self.to_params(), self.counts)

    @classmethod
    def from_weights(
        cls,
        x: WeightMap,
        mode: Optional[str] = None,
        frame: Optional[FrameDocument] = None,
        split_loops: Optional[bool] = None,
    ) -> "ProfileDocument":
        params = x.params
        counts = {gram: int(value) for gram, value in x.to_grams().items()}
        return cls(
            q=params.q,
            l=params.ell,
            alphabet=alphabet_field(params),
            counts=counts,
            mode=mode,
            split_loops=split_loops,
            frame=frame,
        )


class WitnessDocument(Document):
    feasible: bool
    witness: Optional[ProfileDocument] = None


class ErrorBody(BaseModel):
    code: str
    message: str


class ErrorDocument(Document):
    error: ErrorBody


class SizesDocument(Document):
    q: int
    ell: int = Field(alias="l")
    info_length: int
    catalan: int
    systematic: int
    selfloop_M: int
    firstnode: int
    prior_work: int
    allnodes_reference: Optional[int] = None
    total_feasible_reference: Optional[int] = None
    reference_note: Optional[str] = None
    rates: Dict[str, str]
    bounds: Dict[str, str]


class DyckCut(BaseModel):
    vertices: List[str]
    word: str
    dyck: bool


class DyckReportDocument(Document):
    q: int
    ell: int = Field(alias="l")
    mode: str
    passes: bool
    cuts: List[DyckCut]


class EnumerationDocument(Document):
    q: int
    ell: int = Field(alias="l")
    condition: str = "feasible"
    count: int
    total: int
    prefilter: bool = False


class VerifyCase(BaseModel):
    mode: str
    length: int
    balanced: bool
    round_trip: bool
    profile_round_trip: bool
    matches_expected: Optional[bool] = None


class VerifyDocument(Document):
    q: int
    ell: int = Field(alias="l")
    ok: bool
    samples: int
    failures: int
    cases: List[VerifyCase] = Field(default_factory=list)
