"""
非系统码编码器

  - 顶点状态 (over / under / balanced) 与阈值边的角色 (step_up / step_down / stable)
  - calibrate: 把权重 ≥ wt(e*) 的所有边统一抬高 c, 使一个顶点平衡且不改变任何相对顺序
  - encode_first_node: 信息集加入第一条路径边, 先校准起点再继续系统码构造
  - encode_full: 对全排列寻找满足充分条件的顶点顺序, 逐个校准得到见证
"""
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

from loguru import logger

from ..core.errors import CalibrationError, DyckConfigurationError, InvariantViolation, WeightError
from ..core.feasibility import (
    incidence_signs,
    check_enumeration_limit,
    cut_word,
    is_dyck_word,
    next_permutation,
    split_ranges,
    suffix_table,
    unrank_permutation,
)
from ..core.frames import EncodingFrame
from ..core.graph import CodeParams, DeBruijnGraph, Number, Ranking, WeightMap
from .systematic_engine import (
    FIRSTNODE,
    check_encoding,
    information_set,
    place_self_loops,
    run_algorithm,
    check_loop_ranks,
    split_loop_ranks,
)

OVER = "over"
UNDER = "under"
BALANCED = "balanced"

STEP_UP = "step_up"
STEP_DOWN = "step_down"
STABLE = "stable"


@dataclass(frozen=True)
class VertexState:
    """over ⟺ 入权重 < 出权重; under ⟺ 入权重 > 出权重"""

    state: str
    defect: Number


@dataclass(frozen=True)
class EdgeRole:
    role: str
    incoming: int
    outgoing: int


def vertex_state(w: WeightMap, v: int) -> VertexState:
    defect = DeBruijnGraph(w.params).balance_defect(w, v)
    if defect < 0:
        return VertexState(OVER, defect)
    if defect > 0:
        return VertexState(UNDER, defect)
    return VertexState(BALANCED, 0)


def at_or_above(w: WeightMap, e_star: int) -> Tuple[int, ...]:
    """E_{≥e*}: 已赋值且权重不小于 wt(e*) 的边"""
    threshold = w[e_star]
    return tuple(e for e in w.defined_edges() if w[e] >= threshold)


def edge_role(w: WeightMap, v: int, e_star: int) -> EdgeRole:
    """
    阈值边 e* 对顶点 v 的角色

    抬高 E_{≥e*} 时, 入边多于出边会减小 v 的出超 (step_down), 出边多于入边为 step_up。
    """
    graph = DeBruijnGraph(w.params)
    upper = set(at_or_above(w, e_star))
    incoming = sum(1 for e in graph.in_edges(v) if e in upper)
    outgoing = sum(1 for e in graph.out_edges(v) if e in upper)
    if incoming > outgoing:
        return EdgeRole(STEP_DOWN, incoming, outgoing)
    if incoming < outgoing:
        return EdgeRole(STEP_UP, incoming, outgoing)
    return EdgeRole(STABLE, incoming, outgoing)


def calibrate_weights(w: WeightMap, threshold: Number, amount: Number) -> WeightMap:
    """所有权重 ≥ threshold 的边加上 amount (amount > 0 时相对顺序不变)"""
    return w.with_values({
        e: w[e] + amount for e in w.defined_edges() if w[e] >= threshold
    })


def calibrate(w: WeightMap, v: int, e_star: int) -> WeightMap:
    """
    平衡顶点 v: E_{≥e*} 中每条边加 c = |defect(v)| / |入边数 - 出边数|

    Args:
        w: 部分权重, v 的全部关联边必须已赋值
        v: over 状态 (配 step_down) 或 under 状态 (配 step_up) 的顶点
        e_star: 阈值边

    Returns:
        v 平衡后的新权重
    """
    graph = DeBruijnGraph(w.params)
    for e in graph.in_edges(v) + graph.out_edges(v):
        if w.get(e) is None and not graph.is_self_loop(e):
            raise CalibrationError(f"❌ 校准要求 {graph.vertex_name(v)} 的全部关联边已赋值, 缺少 {graph.edge_name(e)}")
    if w.get(e_star) is None:
        raise CalibrationError(f"❌ 阈值边 {graph.edge_name(e_star)} 没有权重")
    state = vertex_state(w, v)
    role = edge_role(w, v, e_star)
    expected = {OVER: STEP_DOWN, UNDER: STEP_UP}.get(state.state)
    if role.role != expected:
        raise CalibrationError(
            f"❌ {graph.vertex_name(v)} 处于 {state.state} 状态, "
            f"阈值边 {graph.edge_name(e_star)} 却是 {role.role}"
        )
    amount = Fraction(abs(state.defect), abs(role.incoming - role.outgoing))
    calibrated = calibrate_weights(w, w[e_star], amount)
    if graph.balance_defect(calibrated, v) != 0:
        raise InvariantViolation(f"❌ 校准后 {graph.vertex_name(v)} 仍不平衡")
    return calibrated


# ============================================================
# 第一个顶点
# ============================================================


def step_edge_from_word(sorted_cut: Sequence[int], word: str, state: str) -> int:
    """
    由最短的严格多数前缀找到阶跃边

    under: 第一个使前缀中入边 (0) 多于出边 (1) 的位置 t, e* = sorted_cut[t] 为 step_up;
    over 对称。
    """
    lead = "0" if state == UNDER else "1"
    balance = 0
    for t, symbol in enumerate(word):
        if balance > 0:
            return sorted_cut[t]
        balance += 1 if symbol == lead else -1
    raise CalibrationError(f"❌ 割边指示串 {word} 中找不到阶跃边")


def encode_first_node(
    frame: EncodingFrame,
    pi: Ranking,
    loop_ranks: Optional[Mapping[int, int]] = None,
) -> WeightMap:
    """
    首顶点编码: 排名定义在非路径边和第一条路径边上

    Args:
        frame: 编码帧
        pi: 扩大信息集上的排名 (给出 loop_ranks 时不含自环)
        loop_ranks: 可选, {自环: 全排列中的绝对排名}

    Returns:
        可行 profile 向量, 在信息集上的投影等于 pi
    """
    params = frame.params
    params.require_encoder_regime()
    graph = frame.graph
    loops = set(graph.self_loops()) if loop_ranks is not None else set()
    domain = tuple(e for e in information_set(frame, FIRSTNODE) if e not in loops)
    pi.require_domain(domain)
    if loop_ranks is not None:
        check_loop_ranks(params, loop_ranks)

    w = WeightMap.from_mapping(params, {e: pi.rank(e) + 1 for e in domain})
    v0 = frame.vertices[0]
    word = cut_word(params, w, (v0,))
    if is_dyck_word(word):
        raise DyckConfigurationError(
            f"❌ 顶点 {graph.vertex_name(v0)} 呈现 Dyck 构型 ({word}), 无法首顶点编码", word
        )

    state = vertex_state(w, v0)
    if state.state != BALANCED:
        incoming, outgoing = graph.cut_edges((v0,))
        sorted_cut = sorted(incoming + outgoing, key=lambda e: w[e])
        e_star = step_edge_from_word(sorted_cut, word, state.state)
        w = calibrate(w, v0, e_star)

    integral, _ = w.to_integers()
    scaled = {e: integral[e] * frame.scale for e in integral.defined_edges()}
    final = run_algorithm(frame, scaled, start=1, skip_loops=loop_ranks is not None)
    x = WeightMap.from_mapping(params, final)
    if loop_ranks is not None:
        x = place_self_loops(x, loop_ranks)
    check_encoding(frame, x, pi, domain)
    if loop_ranks is not None and split_loop_ranks(x) != dict(loop_ranks):
        raise InvariantViolation("❌ 自环的绝对排名未被保留")
    return x


# ============================================================
# 全部顶点
# ============================================================


@dataclass(frozen=True)
class ThresholdSets:
    """按排名阈值 j 划分: f_v(j) = 0 / < 0 / > 0"""

    stable: FrozenSet[int]
    up: FrozenSet[int]
    down: FrozenSet[int]


def _sets_from_table(table: Sequence[Sequence[int]]) -> List[ThresholdSets]:
    return [
        ThresholdSets(
            stable=frozenset(j for j, f in enumerate(suffix) if f == 0),
            up=frozenset(j for j, f in enumerate(suffix) if f < 0),
            down=frozenset(j for j, f in enumerate(suffix) if f > 0),
        )
        for suffix in table
    ]


def threshold_sets(params: CodeParams, order: Sequence[int]) -> List[ThresholdSets]:
    return _sets_from_table(suffix_table(DeBruijnGraph(params), order))


def _search_order(sets: List[ThresholdSets], needed: int, n_ranks: int) -> Optional[Tuple[int, ...]]:
    """回溯搜索顶点顺序; 失败的已选集合记入备忘"""
    failed: Set[FrozenSet[int]] = set()

    def extend(chosen: List[int], allowed: FrozenSet[int]) -> Optional[List[int]]:
        if len(chosen) == needed:
            return chosen
        key = frozenset(chosen)
        if key in failed:
            return None
        candidates = [
            v for v in range(len(sets))
            if v not in key and sets[v].up & allowed and sets[v].down & allowed
        ]
        candidates.sort(key=lambda v: (-len(allowed & sets[v].stable), v))
        for v in candidates:
            found = extend(chosen + [v], allowed & sets[v].stable)
            if found is not None:
                return found
        failed.add(key)
        return None

    found = extend([], frozenset(range(n_ranks)))
    return tuple(found) if found is not None else None


def find_vertex_order(params: CodeParams, pi: Ranking) -> Optional[Tuple[int, ...]]:
    """
    寻找 v_0..v_{m-2}: 每个 v_i 同时拥有对 v_0..v_{i-1} 都稳定的 step_up 和 step_down 阈值

    Returns:
        顶点顺序 (m-1 个顶点), 条件不满足时返回 None
    """
    if not pi.is_total():
        raise WeightError("❌ 全顶点编码需要全排列")
    sets = threshold_sets(params, pi.order)
    return _search_order(sets, params.n_vertices - 1, params.n_edges)


def encode_full(params: CodeParams, pi: Ranking) -> Optional[WeightMap]:
    """
    全顶点编码: 按 find_vertex_order 给出的顺序逐个校准

    返回 None 只说明充分条件不满足, 不代表 π 不可行。
    """
    order = find_vertex_order(params, pi)
    if order is None:
        logger.debug("⚠️ 找不到满足条件的顶点顺序")
        return None
    graph = DeBruijnGraph(params)
    sets = threshold_sets(params, pi.order)
    w = WeightMap.from_mapping(params, {e: pi.rank(e) + 1 for e in graph.edges()})

    allowed = frozenset(range(params.n_edges))
    for v in order:
        state = vertex_state(w, v)
        if state.state != BALANCED:
            pool = sets[v].up if state.state == UNDER else sets[v].down
            j = max(pool & allowed)
            w = calibrate(w, v, pi.order[j])
        allowed &= sets[v].stable

    integral, _ = w.to_integers()
    values = integral.as_ints()
    offset = min(values) - 1
    x = WeightMap.from_ints(params, [value - offset for value in values])
    if not graph.is_balanced(x) or Ranking.from_weights(x) != pi:
        raise InvariantViolation("❌ 全顶点编码输出未通过平衡/顺序校验")
    return x


def iter_full_accepted(params: CodeParams, start: int = 0, stop: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
    """字典序下标 [start, stop) 中满足全顶点条件的排列 (边编号按排名升序)"""
    graph = DeBruijnGraph(params)
    stop = factorial(params.n_edges) if stop is None else min(stop, factorial(params.n_edges))
    if start >= stop:
        return
    signs = incidence_signs(graph)
    order = unrank_permutation(start, params.n_edges)
    for _ in range(start, stop):
        sets = _sets_from_table(suffix_table(graph, order, signs))
        if _search_order(sets, params.n_vertices - 1, params.n_edges) is not None:
            yield tuple(order)
        next_permutation(order)


def _sweep_range(q: int, ell: int, alphabet: Tuple[str, ...], start: int, stop: int) -> int:
    params = CodeParams(q=q, ell=ell, alphabet=alphabet)
    return sum(1 for _ in iter_full_accepted(params, start, stop))


def sweep_full(
    params: CodeParams,
    parallel: int = 1,
    force: bool = False,
    on_chunk: Optional[Callable[[int, int], None]] = None,
) -> int:
    """统计全部 (q^ℓ)! 个排列中满足全顶点条件的个数"""
    check_enumeration_limit(params, force)
    total = factorial(params.n_edges)
    ranges = split_ranges(total, max(1, parallel) * 4)
    args = [(params.q, params.ell, params.alphabet, a, b) for a, b in ranges]
    started = time.time()
    logger.info(f"🚀 全顶点条件扫描: {total} 个排列")
    counts: List[int] = []
    if parallel <= 1:
        for done, arg in enumerate(args, 1):
            counts.append(_sweep_range(*arg))
            if on_chunk:
                on_chunk(done, len(args))
    else:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            futures = [pool.submit(_sweep_range, *arg) for arg in args]
            for done, future in enumerate(futures, 1):
                counts.append(future.result())
                if on_chunk:
                    on_chunk(done, len(args))
    accepted = sum(counts)
    logger.info(f"✅ 满足条件: {accepted} / {total} (⏱️ {time.time() - started:.1f}s)")
    return accepted


class NonSystematicEngine:
    """首顶点 / 全顶点编码器"""

    def __init__(self, frame: EncodingFrame):
        frame.params.require_encoder_regime()
        self.frame = frame

    def encode_first_node(self, pi: Ranking, loop_ranks: Optional[Mapping[int, int]] = None) -> WeightMap:
        x = encode_first_node(self.frame, pi, loop_ranks)
        logger.info(f"✅ 首顶点编码完成: 总长度 {x.total()}")
        return x

    def encode_full(self, pi: Ranking) -> Optional[WeightMap]:
        x = encode_full(self.frame.params, pi)
        if x is not None:
            logger.info(f"✅ 全顶点编码完成: 总长度 {x.total()}")
        return x
