"""
秩调制编码服务 (CLI 与脚本共用的门面)

支持的编码模式:
  - systematic: 哈密顿环种子 + 欧拉回路平衡
  - selfloop: 自环扩展
  - firstnode: 首顶点编码 (可选自环单独排名)
  - full: 全顶点充分条件编码
"""
import json
import random
import time
from math import factorial
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, Union

from loguru import logger

from ..config import config
from ..engines.nonsystematic_engine import NonSystematicEngine, encode_full, find_vertex_order, sweep_full
from ..engines.systematic_engine import (
    FIRSTNODE,
    FULL,
    MODES,
    SELFLOOP,
    SYSTEMATIC,
    SystematicEngine,
    decode,
    information_set,
)
from .codebook import REFERENCE_NOTE, code_sizes, length_bounds
from .errors import ConditionNotMet, DyckConfigurationError, ParameterError, RankModError
from .feasibility import (
    check_enumeration_limit,
    dyck_report,
    enumerate_feasible,
    is_feasible_ranking,
    is_feasible_vector,
)
from .frames import EncodingFrame, build_frame, frame_from_strings, frame_to_strings
from .graph import CodeParams, DeBruijnGraph, Ranking
from .schemas import (
    DyckCut,
    DyckReportDocument,
    EnumerationDocument,
    FrameDocument,
    ProfileDocument,
    RankingDocument,
    SizesDocument,
    VerifyCase,
    VerifyDocument,
    WitnessDocument,
    alphabet_field,
)
from .sequence import profile_map, profile_vector, realize_string

FrameKey = Tuple[CodeParams, Optional[str], Optional[str], bool]


def read_json(path: Union[str, Path]) -> dict:
    path = Path(path)
    if not path.exists():
        raise ParameterError(f"❌ 文件不存在: {path}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ParameterError(f"❌ JSON 解析失败 ({path}): {e}")


class RankModService:
    """编码帧缓存 + 各模式编解码"""

    def __init__(self):
        self._frames: Dict[FrameKey, EncodingFrame] = {}

    # --- 帧 ---

    def get_frame(
        self,
        params: CodeParams,
        frame_doc: Optional[FrameDocument] = None,
        reduced: bool = False,
    ) -> EncodingFrame:
        """
        获取 (并缓存) 编码帧

        Args:
            params: 码参数
            frame_doc: 用户提供的 α/β; 缺省时自动生成
            reduced: ℓ=2 缩减 Δ 模式

        Returns:
            已校验的 EncodingFrame
        """
        if frame_doc is not None:
            frame_params = frame_doc.to_params()
            if frame_params != params:
                raise ParameterError(
                    f"❌ 帧参数 q={frame_params.q}, ℓ={frame_params.ell}, 字母表 {''.join(frame_params.alphabet)} "
                    f"与 q={params.q}, ℓ={params.ell}, 字母表 {''.join(params.alphabet)} 不一致"
                )
            reduced = reduced or frame_doc.reduced
        key = (params, frame_doc.alpha if frame_doc else None, frame_doc.euler if frame_doc else None, reduced)
        if key in self._frames:
            return self._frames[key]
        if frame_doc is not None:
            frame = frame_from_strings(params, frame_doc.alpha, frame_doc.euler, reduced=reduced)
        else:
            frame = build_frame(params, reduced=reduced)
        self._frames[key] = frame
        logger.info(f"✅ 编码帧就绪: q={params.q}, ℓ={params.ell}, Δ={frame.delta}")
        return frame

    @staticmethod
    def frame_document(frame: EncodingFrame) -> FrameDocument:
        alpha, euler = frame_to_strings(frame)
        params = frame.params
        return FrameDocument(
            q=params.q,
            l=params.ell,
            alphabet=alphabet_field(params),
            alpha=alpha,
            euler=euler,
            reduced=frame.reduced,
        )

    # --- 编解码 ---

    def encode(
        self,
        doc: RankingDocument,
        mode: str = SYSTEMATIC,
        frame_doc: Optional[FrameDocument] = None,
        reduced: bool = False,
    ) -> ProfileDocument:
        """
        排名 JSON -> profile JSON (附带模式和所用的帧)

        Args:
            doc: 排名文档 (selfloop 模式需要 loop_ranks)
            mode: systematic / selfloop / firstnode / full
            frame_doc: 可选的帧
            reduced: ℓ=2 缩减 Δ 模式
        """
        if mode not in MODES:
            raise ParameterError(f"❌ 未知的编码模式: {mode}, 可选 {list(MODES)}")
        params = doc.to_params()
        pi = doc.to_ranking(params)
        loop_ranks = doc.to_loop_ranks(params)
        split_loops = False
        start_time = time.time()
        try:
            if mode == FULL:
                x = encode_full(params, pi)
                if x is None:
                    raise ConditionNotMet("❌ 找不到满足全顶点条件的顶点顺序 (不代表该排列不可行)")
                return ProfileDocument.from_weights(x, mode=mode)

            frame = self.get_frame(params, frame_doc, reduced)
            if mode == SYSTEMATIC:
                x = SystematicEngine(frame).encode(pi)
            elif mode == SELFLOOP:
                if loop_ranks is None:
                    raise ParameterError("❌ selfloop 模式需要 loop_ranks")
                x = SystematicEngine(frame).encode_with_self_loops(pi, loop_ranks)
            else:
                x = NonSystematicEngine(frame).encode_first_node(pi, loop_ranks)
                split_loops = loop_ranks is not None
        except RankModError as e:
            logger.error(f"❌ 编码失败 ({mode}): {e}")
            raise
        logger.info(f"⏱️ 编码 ({mode}) 用时 {time.time() - start_time:.4f}s")
        return ProfileDocument.from_weights(
            x, mode=mode, frame=self.frame_document(frame), split_loops=split_loops or None
        )

    def decode(
        self,
        doc: ProfileDocument,
        mode: Optional[str] = None,
        frame_doc: Optional[FrameDocument] = None,
        reduced: bool = False,
        split_loops: bool = False,
    ) -> RankingDocument:
        """profile JSON -> 信息集上的排名 JSON; 帧和模式缺省取文档中嵌入的值"""
        params = doc.to_params()
        mode = mode or doc.mode or SYSTEMATIC
        if mode not in MODES:
            raise ParameterError(f"❌ 未知的编码模式: {mode}")
        x = doc.to_weights(params)
        if mode == FULL:
            return RankingDocument.from_ranking(Ranking.from_weights(x))
        frame = self.get_frame(params, frame_doc or doc.frame, reduced)
        decoded = decode(frame, x, mode, split_loops=split_loops or bool(doc.split_loops))
        return RankingDocument.from_ranking(decoded.ranking, decoded.loop_ranks)

    # --- 字符串 ---

    @staticmethod
    def realize(doc: ProfileDocument) -> str:
        return realize_string(doc.to_weights())

    @staticmethod
    def profile(s: str, ell: int, alphabet: Optional[str] = None) -> ProfileDocument:
        if ell >= 2:
            params = CodeParams.create(len(alphabet), ell, list(alphabet)) if alphabet else None
            return ProfileDocument.from_weights(profile_vector(s, ell, params))
        symbols = alphabet or "".join(sorted(set(s)))
        return ProfileDocument(q=len(symbols), l=ell, alphabet=symbols, counts=profile_map(s, ell, symbols))

    # --- 可行性 ---

    @staticmethod
    def feasible(doc: Union[RankingDocument, ProfileDocument]) -> WitnessDocument:
        """排名: LP 判定并给出见证; profile: 直接检查平衡"""
        params = doc.to_params()
        if isinstance(doc, ProfileDocument):
            x = doc.to_weights(params)
            ok = is_feasible_vector(x)
            return WitnessDocument(feasible=ok, witness=doc if ok else None)
        witness = is_feasible_ranking(params, doc.to_ranking(params))
        if witness is None:
            return WitnessDocument(feasible=False)
        return WitnessDocument(feasible=True, witness=ProfileDocument.from_weights(witness.profile))

    @staticmethod
    def check_dyck(doc: Union[RankingDocument, ProfileDocument], mode: str = "singletons") -> DyckReportDocument:
        params = doc.to_params()
        values = doc.to_ranking(params) if isinstance(doc, RankingDocument) else doc.to_weights(params)
        graph = DeBruijnGraph(params)
        cuts = [
            DyckCut(vertices=[graph.vertex_name(v) for v in cut], word=word, dyck=is_dyck)
            for cut, word, is_dyck in dyck_report(params, values, mode)
        ]
        return DyckReportDocument(
            q=params.q, l=params.ell, mode=mode, passes=not any(c.dyck for c in cuts), cuts=cuts
        )

    @staticmethod
    def enumerate(
        params: CodeParams,
        parallel: Optional[int] = None,
        prefilter: bool = True,
        force: bool = False,
        output: Optional[Path] = None,
        on_chunk: Optional[Callable[[int, int], None]] = None,
    ) -> EnumerationDocument:
        """
        统计可行排列; 给出 output 时把每个可行排列写成一行 RankingDocument (JSON Lines)
        """
        workers = config.PARALLEL_WORKERS if parallel is None else parallel
        if output is None:
            result = enumerate_feasible(
                params, parallel=workers, dyck_prefilter=prefilter, force=force, on_chunk=on_chunk
            )
        else:
            check_enumeration_limit(params, force)
            output.parent.mkdir(parents=True, exist_ok=True)
            with output.open("w", encoding="utf-8") as f:

                def write(ranking: Ranking):
                    f.write(RankingDocument.from_ranking(ranking).model_dump_json(by_alias=True, exclude_none=True))
                    f.write("\n")

                result = enumerate_feasible(
                    params,
                    parallel=workers,
                    dyck_prefilter=prefilter,
                    force=force,
                    on_chunk=on_chunk,
                    on_ranking=write,
                )
            logger.info(f"💾 已写出 {result.count} 个可行排列: {output}")
        return EnumerationDocument(
            q=params.q, l=params.ell, count=result.count, total=result.total, prefilter=prefilter
        )

    @staticmethod
    def sweep(
        params: CodeParams,
        parallel: Optional[int] = None,
        force: bool = False,
        on_chunk: Optional[Callable[[int, int], None]] = None,
    ) -> EnumerationDocument:
        """统计满足全顶点充分条件的排列个数"""
        count = sweep_full(
            params, parallel=config.PARALLEL_WORKERS if parallel is None else parallel, force=force, on_chunk=on_chunk
        )
        total = factorial(params.n_edges)
        return EnumerationDocument(q=params.q, l=params.ell, condition="allnodes", count=count, total=total)

    # --- 码本 ---

    @staticmethod
    def sizes(params: CodeParams, reduced: bool = False) -> SizesDocument:
        report = code_sizes(params)
        bounds = length_bounds(params, reduced)
        rendered_bounds = {
            "upper": str(bounds.upper),
            "lower": str(bounds.lower),
            "path_weight": str(bounds.path_weight),
            "k_max": str(bounds.k_max),
        }
        if bounds.reduced_upper is not None:
            rendered_bounds["reduced_upper"] = str(bounds.reduced_upper)
        if bounds.prior_work_upper is not None:
            rendered_bounds["prior_work_upper"] = str(bounds.prior_work_upper)
        has_reference = report.allnodes_reference is not None or report.total_feasible_reference is not None
        return SizesDocument(
            q=report.q,
            l=report.ell,
            info_length=report.info_length,
            catalan=report.catalan,
            systematic=report.systematic,
            selfloop_M=report.selfloop_M,
            firstnode=report.firstnode,
            prior_work=report.prior_work,
            allnodes_reference=report.allnodes_reference,
            total_feasible_reference=report.total_feasible_reference,
            reference_note=REFERENCE_NOTE if has_reference else None,
            rates={name: str(value) for name, value in report.rates.items()},
            bounds=rendered_bounds,
        )

    # --- 自检 ---

    @staticmethod
    def random_ranking(frame: EncodingFrame, mode: str, rng: random.Random) -> Tuple[Ranking, Optional[Dict[int, int]]]:
        """随机信息集排名 (selfloop 模式同时给出随机的自环绝对排名)"""
        params = frame.params
        domain = list(information_set(frame, mode))
        loop_ranks = None
        if mode == SELFLOOP:
            loops = DeBruijnGraph(params).self_loops()
            positions = rng.sample(range(params.n_edges), len(loops))
            loop_ranks = dict(zip(loops, positions))
        rng.shuffle(domain)
        return Ranking(params, tuple(domain)), loop_ranks

    def verify(
        self,
        params: CodeParams,
        frame_doc: Optional[FrameDocument] = None,
        ranking_doc: Optional[RankingDocument] = None,
        expected: Optional[ProfileDocument] = None,
        mode: str = SYSTEMATIC,
        samples: int = 1,
        seed: int = 0,
        reduced: bool = False,
    ) -> VerifyDocument:
        """
        编码 -> 实现字符串 -> 重新计数 -> 解码 -> 比较

        给出 ranking_doc 时只验证这一个输入 (expected 给出时同时比较 profile);
        否则用固定种子生成 samples 个随机排名。firstnode 模式下只有随机生成的排名遇到 Dyck 构型时才会重新抽取。
        """
        if mode == FULL:
            raise ParameterError("❌ verify 不支持 full 模式 (输入是全排列, 没有信息集)")
        frame = self.get_frame(params, frame_doc, reduced)
        rng = random.Random(seed)
        cases: List[VerifyCase] = []
        inputs: List[Tuple[Ranking, Optional[Dict[int, int]]]] = []
        generated = ranking_doc is None
        if not generated:
            inputs.append((ranking_doc.to_ranking(params), ranking_doc.to_loop_ranks(params)))
        else:
            inputs.extend(self.random_ranking(frame, mode, rng) for _ in range(samples))

        started = time.time()
        for pi, loop_ranks in inputs:
            cases.append(self._verify_one(frame, mode, pi, loop_ranks, expected, rng, generated))
        failures = sum(1 for c in cases if not (c.balanced and c.round_trip and c.profile_round_trip)
                       or c.matches_expected is False)
        logger.info(f"📊 自检: {len(cases)} 个样本, {failures} 个失败 (⏱️ {time.time() - started:.2f}s)")
        return VerifyDocument(
            q=params.q, l=params.ell, ok=failures == 0, samples=len(cases), failures=failures, cases=cases
        )

    def _verify_one(
        self,
        frame: EncodingFrame,
        mode: str,
        pi: Ranking,
        loop_ranks: Optional[Dict[int, int]],
        expected: Optional[ProfileDocument],
        rng: random.Random,
        generated: bool = True,
    ) -> VerifyCase:
        """generated=False 时输入来自用户, 编码失败直接抛出"""
        engine = SystematicEngine(frame)
        while True:
            try:
                if mode == SYSTEMATIC:
                    x = engine.encode(pi)
                elif mode == SELFLOOP:
                    x = engine.encode_with_self_loops(pi, loop_ranks or {})
                else:
                    x = NonSystematicEngine(frame).encode_first_node(pi, loop_ranks)
                break
            except DyckConfigurationError:
                if mode != FIRSTNODE or not generated:
                    raise
                pi, loop_ranks = self.random_ranking(frame, mode, rng)

        s = realize_string(x)
        recounted = profile_vector(s, frame.params.ell, frame.params)
        decoded = decode(frame, x, mode, split_loops=loop_ranks is not None)
        round_trip = decoded.ranking == pi and (loop_ranks is None or decoded.loop_ranks == loop_ranks)
        matches = None
        if expected is not None:
            matches = expected.to_weights(frame.params) == x
        return VerifyCase(
            mode=mode,
            length=len(s),
            balanced=DeBruijnGraph(frame.params).is_balanced(x),
            round_trip=round_trip,
            profile_round_trip=recounted == x,
            matches_expected=matches,
        )

    @staticmethod
    def vertex_order(doc: RankingDocument) -> Optional[List[str]]:
        """全顶点条件下的顶点顺序 (条件不满足时为 None)"""
        params = doc.to_params()
        order = find_vertex_order(params, doc.to_ranking(params))
        if order is None:
            return None
        graph = DeBruijnGraph(params)
        return [graph.vertex_name(v) for v in order]


_service = None


def get_service() -> RankModService:
    global _service
    if _service is None:
        _service = RankModService()
    return _service
