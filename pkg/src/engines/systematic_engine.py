"""
系统码编码器

信息集 (去掉哈密顿路径边后的全部边) 上的任意排名被映射为一个可行 profile 向量。
内部全部以 1/(2·delta) 为单位做整数计算, 没有任何有理数或浮点运算:
  1. 信息集的边取 (rank+1)·2·delta
  2. 沿哈密顿路径依次平衡: 路径边权重 = 顶点入权重 - 其余出边权重
  3. 第 i 个平局圈上每条边加 2(i+1)
  4. 哈密顿圈上每条边加 1
  5. 整体平移使最小值为 1
"""
import time
from dataclasses import dataclass, field
from math import comb
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from loguru import logger

from ..core.errors import InvariantViolation, RankingError, WeightError
from ..core.frames import EncodingFrame
from ..core.graph import CodeParams, DeBruijnGraph, Ranking, WeightMap

SYSTEMATIC = "systematic"
SELFLOOP = "selfloop"
FIRSTNODE = "firstnode"
FULL = "full"
MODES = (SYSTEMATIC, SELFLOOP, FIRSTNODE, FULL)


@dataclass
class EncodingTrace:
    """
    各阶段的中间权重 (真实单位, 可能是分数)

    seeded / balanced / tie_broken / lifted 对应步骤 1-4, output 是最终整数结果。
    """

    scale: int = 1
    seeded: Optional[WeightMap] = None
    balanced: Optional[WeightMap] = None
    tie_broken: Optional[WeightMap] = None
    lifted: Optional[WeightMap] = None
    output: Optional[WeightMap] = None
    extra: Dict[str, WeightMap] = field(default_factory=dict)


def information_set(frame: EncodingFrame, mode: str = SYSTEMATIC) -> Tuple[int, ...]:
    """
    各模式下由用户排名的边

    systematic: 非路径边; selfloop: 非路径边去掉自环; firstnode: 非路径边加第一条路径边; full: 全部边
    """
    graph = frame.graph
    if mode == FULL:
        return tuple(graph.edges())
    fixed = set(frame.path_edges)
    if mode == FIRSTNODE:
        fixed.discard(frame.alpha[0])
    elif mode == SELFLOOP:
        fixed.update(graph.self_loops())
    elif mode != SYSTEMATIC:
        raise RankingError(f"❌ 未知的编码模式: {mode}")
    return tuple(e for e in graph.edges() if e not in fixed)


def _to_map(params: CodeParams, scaled: Mapping[int, int], scale: int) -> WeightMap:
    return WeightMap.from_scaled(
        params, [scaled.get(e, 0) for e in range(params.n_edges)], scale
    ).with_values({e: None for e in range(params.n_edges) if e not in scaled})


def run_algorithm(
    frame: EncodingFrame,
    scaled: Dict[int, int],
    start: int = 0,
    skip_loops: bool = False,
    path_bound: Optional[int] = None,
    trace: Optional[EncodingTrace] = None,
) -> Dict[int, int]:
    """
    从平衡步骤开始执行系统码构造 (单位 1/(2·delta))

    Args:
        frame: 编码帧
        scaled: 已知的权重 (除 e_start..e_{m-2} 以外的全部边; skip_loops 时不含自环)
        start: 第一条需要平衡的哈密顿路径边的下标
        skip_loops: 在去掉自环的图上运行
        path_bound: 平衡后 |wt(e_i)| 的上界 (同单位), None 表示不检查
        trace: 可选的中间结果记录

    Returns:
        平移后的整数权重 (最小值为 1)
    """
    graph = frame.graph
    params = frame.params
    scale = frame.scale
    weights = dict(scaled)
    loops = set(graph.self_loops()) if skip_loops else set()

    def known(edges):
        return [e for e in edges if e not in loops]

    for i in range(start, len(frame.alpha) - 1):
        edge = frame.alpha[i]
        v = graph.src(edge)
        try:
            incoming = sum(weights[e] for e in known(graph.in_edges(v)))
            outgoing = sum(weights[e] for e in known(graph.out_edges(v)) if e != edge)
        except KeyError as missing:
            raise InvariantViolation(
                f"❌ 平衡 e_{i} 时边 {graph.edge_name(missing.args[0])} 尚无权重"
            )
        weights[edge] = incoming - outgoing
        if path_bound is not None and abs(weights[edge]) > path_bound:
            raise InvariantViolation(
                f"❌ 哈密顿路径边 {graph.edge_name(edge)} 的权重 {weights[edge]}/{scale} 超出上界"
            )
    if trace is not None:
        trace.scale = scale
        trace.balanced = _to_map(params, weights, scale)

    added: Dict[int, int] = {}
    for i in range(start, len(frame.alpha) - 1):
        for e in frame.gammas[i]:
            if e in loops:
                continue
            added[e] = added.get(e, 0) + 2 * (i + 1)
    if added and max(added.values()) > scale - 2:
        raise InvariantViolation(f"❌ 平局增量 {max(added.values())} 超过 2Δ-2 = {scale - 2}")
    for e, extra in added.items():
        weights[e] += extra
    if trace is not None:
        trace.tie_broken = _to_map(params, weights, scale)

    for e in frame.alpha:
        weights[e] += 1
    if trace is not None:
        trace.lifted = _to_map(params, weights, scale)

    offset = min(weights.values()) - 1
    return {e: value - offset for e, value in weights.items()}


def check_encoding(frame: EncodingFrame, x: WeightMap, pi: Ranking, domain: Sequence[int]):
    graph = frame.graph
    values = x.as_ints()
    if not graph.is_balanced(x):
        raise InvariantViolation("❌ 编码输出不平衡")
    if len(set(values)) != len(values):
        raise InvariantViolation("❌ 编码输出存在相同权重")
    if min(values) != 1:
        raise InvariantViolation(f"❌ 编码输出最小值为 {min(values)}, 应为 1")
    if Ranking.from_weights(x).project(domain) != pi:
        raise InvariantViolation("❌ 编码输出在信息集上的投影与输入排名不一致")


def path_weight_bound(frame: EncodingFrame) -> int:
    """平衡后哈密顿路径边 |wt| 的上界 C(N+1, 2), 单位 1/(2·delta)"""
    return comb(frame.params.info_length + 1, 2) * frame.scale


def check_total_weight(x: WeightMap):
    params = x.params
    limit = params.q ** (5 * params.ell)
    total = x.total()
    if total > limit:
        raise InvariantViolation(f"❌ 总权重 {total} 超过 q^(5ℓ) = {limit}")


def encode_systematic(frame: EncodingFrame, pi: Ranking, trace: Optional[EncodingTrace] = None) -> WeightMap:
    """
    信息集排名 -> 可行 profile 向量 (单射)

    Args:
        frame: 编码帧
        pi: 定义在非路径边上的排名
        trace: 可选, 记录中间阶段

    Returns:
        正整数、互不相同、最小值为 1 的平衡权重
    """
    params = frame.params
    params.require_encoder_regime()
    domain = information_set(frame, SYSTEMATIC)
    pi.require_domain(domain)

    scale = frame.scale
    seeded = {e: (pi.rank(e) + 1) * scale for e in domain}
    if trace is not None:
        trace.seeded = _to_map(params, seeded, scale)
    final = run_algorithm(frame, seeded, path_bound=path_weight_bound(frame), trace=trace)

    x = WeightMap.from_ints(params, [final[e] for e in range(params.n_edges)])
    check_encoding(frame, x, pi, domain)
    check_total_weight(x)
    if trace is not None:
        trace.output = x
    return x


def check_loop_ranks(params: CodeParams, loop_ranks: Mapping[int, int]) -> Dict[int, int]:
    """自环的绝对排名: 键恰好是 q 条自环, 值互不相同且在 0..q^ℓ-1"""
    graph = DeBruijnGraph(params)
    loops = set(graph.self_loops())
    if set(loop_ranks) != loops:
        names = sorted(graph.edge_name(e) for e in loops)
        raise RankingError(f"❌ loop_ranks 必须恰好给出自环 {names} 的排名")
    ranks = list(loop_ranks.values())
    if len(set(ranks)) != len(ranks):
        raise RankingError("❌ 自环的排名冲突")
    for r in ranks:
        if not isinstance(r, int) or not 0 <= r < params.n_edges:
            raise RankingError(f"❌ 自环排名 {r!r} 不在 0..{params.n_edges - 1} 范围内")
    return dict(loop_ranks)


def place_self_loops(weights: WeightMap, loop_ranks: Mapping[int, int]) -> WeightMap:
    """
    在不含自环的平衡权重中插入 q 条自环, 使其在全排列中位于指定的绝对排名

    非自环权重先乘以 (q+1), 相邻权重之间至少留出 q 个空位; 自环对任何顶点的
    平衡都没有影响。
    """
    params = weights.params
    graph = DeBruijnGraph(params)
    loop_ranks = check_loop_ranks(params, loop_ranks)
    loops = set(loop_ranks)
    others = [e for e in graph.edges() if e not in loops]
    for e in others:
        if not isinstance(weights.get(e), int):
            raise WeightError(f"❌ 边 {graph.edge_name(e)} 需要整数权重才能插入自环")
    stretched = {e: weights[e] * (params.q + 1) for e in others}
    ordered = sorted(others, key=lambda e: stretched[e])

    placed: Dict[int, int] = {}
    previous_below = None
    run = 0
    for k, loop in enumerate(sorted(loops, key=lambda e: loop_ranks[e])):
        below = loop_ranks[loop] - k
        if below < 0 or below > len(ordered):
            raise RankingError(f"❌ 自环 {graph.edge_name(loop)} 的排名 {loop_ranks[loop]} 无法实现")
        run = run + 1 if below == previous_below else 1
        previous_below = below
        base = stretched[ordered[below - 1]] if below > 0 else 0
        placed[loop] = base + run

    combined = {**stretched, **placed}
    offset = min(combined.values()) - 1
    return WeightMap.from_ints(params, [combined[e] - offset for e in graph.edges()])


def split_loop_ranks(x: WeightMap) -> Dict[int, int]:
    """全排列中各自环的绝对排名"""
    full = Ranking.from_weights(x)
    return {e: full.rank(e) for e in DeBruijnGraph(x.params).self_loops()}


def encode_with_self_loops(
    frame: EncodingFrame,
    pi_core: Ranking,
    loop_ranks: Mapping[int, int],
    trace: Optional[EncodingTrace] = None,
) -> WeightMap:
    """
    自环扩展: 在去掉自环的图上运行系统码构造, 再按 loop_ranks 放置自环

    Args:
        frame: 编码帧
        pi_core: 非路径且非自环的边上的排名
        loop_ranks: {自环: 全排列中的绝对排名}
    """
    params = frame.params
    params.require_encoder_regime()
    domain = information_set(frame, SELFLOOP)
    pi_core.require_domain(domain)
    check_loop_ranks(params, loop_ranks)

    scale = frame.scale
    seeded = {e: (pi_core.rank(e) + 1) * scale for e in domain}
    if trace is not None:
        trace.seeded = _to_map(params, seeded, scale)
    final = run_algorithm(frame, seeded, skip_loops=True, path_bound=path_weight_bound(frame), trace=trace)
    core = WeightMap.from_mapping(params, final)
    x = place_self_loops(core, loop_ranks)

    check_encoding(frame, x, pi_core, domain)
    # 非自环权重已按 (q+1) 拉伸, 总长度仍受 q^(5ℓ) 约束
    check_total_weight(x)
    if split_loop_ranks(x) != dict(loop_ranks):
        raise InvariantViolation("❌ 自环的绝对排名未被保留")
    if trace is not None:
        trace.output = x
    return x


def rank_of_weights(w: WeightMap, strict: bool = True) -> Ranking:
    """唯一满足 w ⊨ π 的排名; strict=False 时按 gram 字典序打破平局 (有损)"""
    return Ranking.from_weights(w, strict=strict)


def project_ranking(r: Ranking, subset: Sequence[int]) -> Ranking:
    return r.project(subset)


@dataclass(frozen=True)
class DecodedRanking:
    ranking: Ranking
    loop_ranks: Optional[Dict[int, int]] = None


def decode(frame: EncodingFrame, x: WeightMap, mode: str = SYSTEMATIC, split_loops: bool = False) -> DecodedRanking:
    """
    解码 = 投影到对应模式的信息集

    Args:
        frame: 编码时使用的帧
        x: profile 向量
        mode: systematic / selfloop / firstnode / full
        split_loops: firstnode 模式下自环单独以绝对排名返回
    """
    if not x.is_profile():
        raise WeightError("❌ 解码输入必须是正整数 profile 向量")
    full = Ranking.from_weights(x)
    if mode == SELFLOOP or (mode == FIRSTNODE and split_loops):
        domain = set(information_set(frame, mode)) - set(frame.graph.self_loops())
        return DecodedRanking(full.project(sorted(domain)), split_loop_ranks(x))
    return DecodedRanking(full.project(information_set(frame, mode)))


class SystematicEngine:
    """绑定一个编码帧的系统码编码器"""

    def __init__(self, frame: EncodingFrame):
        """
        Args:
            frame: 已校验的编码帧
        """
        frame.params.require_encoder_regime()
        self.frame = frame

    @property
    def information_set(self) -> Tuple[int, ...]:
        return information_set(self.frame, SYSTEMATIC)

    def encode(self, pi: Ranking, trace: Optional[EncodingTrace] = None) -> WeightMap:
        start_time = time.time()
        x = encode_systematic(self.frame, pi, trace)
        logger.info(
            f"✅ 系统码编码完成: 总长度 {x.total()} (⏱️ {time.time() - start_time:.4f}s)"
        )
        return x

    def encode_with_self_loops(self, pi_core: Ranking, loop_ranks: Mapping[int, int]) -> WeightMap:
        x = encode_with_self_loops(self.frame, pi_core, loop_ranks)
        logger.info(f"✅ 自环扩展编码完成: 总长度 {x.total()}")
        return x

    def decode(self, x: WeightMap, mode: str = SYSTEMATIC) -> DecodedRanking:
        return decode(self.frame, x, mode)
