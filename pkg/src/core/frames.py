"""
编码帧: 哈密顿圈 α, 欧拉扩展 β, 打破平局用的圈 γ_i 以及缩放常数 Δ

帧一旦构建即不可变, 可在多个线程/进程间共享。
"""
from dataclasses import dataclass, field
from math import comb
from typing import Iterator, List, Optional, Sequence, Tuple

from loguru import logger

from .errors import FrameError, InvariantViolation, ParameterError
from .graph import CodeParams, DeBruijnGraph


def lyndon_words(q: int, n: int) -> Iterator[Tuple[int, ...]]:
    """按字典序生成长度整除 n 的 Lyndon 词 (Duval 迭代法)"""
    word = [-1]
    while word:
        word[-1] += 1
        size = len(word)
        if n % size == 0:
            yield tuple(word)
        while len(word) < n:
            word.append(word[len(word) - size])
        while word and word[-1] == q - 1:
            word.pop()


def de_bruijn_digits(q: int, n: int) -> List[int]:
    """FKM: 按字典序拼接 Lyndon 词, 得到 n 阶 De Bruijn 序列 (长度 q^n)"""
    digits: List[int] = []
    for word in lyndon_words(q, n):
        digits.extend(word)
    return digits


def is_de_bruijn_sequence(symbols: Sequence[int], order: int, q: int) -> bool:
    """循环意义下每个长度为 order 的窗口恰好出现一次"""
    if len(symbols) != q ** order:
        return False
    size = len(symbols)
    seen = set()
    for i in range(size):
        seen.add(tuple(symbols[(i + k) % size] for k in range(order)))
    return len(seen) == size


@dataclass(frozen=True)
class EncodingFrame:
    """
    系统码构造的参数块

    Attributes:
        alpha: 哈密顿圈 e_0..e_{m-1} (m = q^(ℓ-1)), e_i = v_i → v_{i+1}
        beta: 欧拉扩展, alpha‖beta 是欧拉回路
        gammas: γ_i (i = 0..m-2), 第一个元素是 e_i, 其余是 β 上的路径
        delta: 缩放常数 Δ
        spans: γ_i 在 β 上的下标区间 (s, s'); 缩减模式下为空
        reduced: ℓ=2 时的缩减 Δ 模式 (Δ = q, γ_i = e_i 加其反向边)
    """

    params: CodeParams
    alpha: Tuple[int, ...]
    beta: Tuple[int, ...]
    gammas: Tuple[Tuple[int, ...], ...]
    delta: int
    spans: Tuple[Tuple[int, int], ...] = ()
    reduced: bool = False
    graph: DeBruijnGraph = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "graph", DeBruijnGraph(self.params))

    @property
    def vertices(self) -> Tuple[int, ...]:
        """v_0..v_{m-1}"""
        return tuple(self.graph.src(e) for e in self.alpha)

    @property
    def path_edges(self) -> Tuple[int, ...]:
        """哈密顿圈去掉最后一条边"""
        return self.alpha[:-1]

    @property
    def closing_edge(self) -> int:
        return self.alpha[-1]

    @property
    def scale(self) -> int:
        """内部单位 (2Δ)^-1"""
        return 2 * self.delta


def standard_delta(params: CodeParams) -> int:
    """Δ = C(q^(ℓ-1), 2) + 1"""
    return comb(params.n_vertices, 2) + 1


def default_hamiltonian(params: CodeParams) -> Tuple[int, ...]:
    """
    由 ℓ-1 阶 De Bruijn 序列得到的哈密顿圈

    序列的每个长度为 ℓ-1 的循环窗口是一个顶点, 长度为 ℓ 的循环窗口是连接相邻顶点的边。
    ℓ ≥ 3 时旋转到第一个没有自环的顶点作为 v_0 (首顶点编码需要 q 条入边和 q 条出边都跨割);
    ℓ = 2 时每个顶点都有自环, 不旋转。
    """
    params.require_encoder_regime()
    graph = DeBruijnGraph(params)
    digits = de_bruijn_digits(params.q, params.ell - 1)
    alpha = tuple(graph.cyclic_window_ids(digits, params.ell))
    if params.ell >= 3:
        looped = {graph.src(e) for e in graph.self_loops()}
        start = next(i for i, e in enumerate(alpha) if graph.src(e) not in looped)
        alpha = alpha[start:] + alpha[:start]
    return alpha


def _check_hamiltonian(graph: DeBruijnGraph, alpha: Sequence[int]):
    m = graph.n_vertices
    if len(alpha) != m:
        raise FrameError(f"❌ 哈密顿圈应有 {m} 条边, 实际 {len(alpha)}")
    for e in alpha:
        if not 0 <= e < graph.n_edges:
            raise FrameError(f"❌ 哈密顿圈含有越界的边编号 {e}")
    visited = [graph.src(e) for e in alpha]
    if len(set(visited)) != m:
        raise FrameError("❌ 哈密顿圈重复经过了某个顶点")
    for i, e in enumerate(alpha):
        if graph.dest(e) != graph.src(alpha[(i + 1) % m]):
            raise FrameError(
                f"❌ 哈密顿圈在 {graph.edge_name(e)} 之后断开"
            )


def _check_eulerian(graph: DeBruijnGraph, cycle: Sequence[int]):
    if len(cycle) != graph.n_edges or len(set(cycle)) != graph.n_edges:
        raise FrameError("❌ alpha‖beta 必须恰好包含每条边一次")
    for i, e in enumerate(cycle):
        if graph.dest(e) != graph.src(cycle[(i + 1) % len(cycle)]):
            raise FrameError(f"❌ 欧拉回路在 {graph.edge_name(e)} 之后断开")


def eulerian_extension(params: CodeParams, alpha: Sequence[int]) -> Tuple[int, ...]:
    """
    在残余图 (去掉 alpha 的边) 上从起点出发做 Hierholzer, 得到 beta

    q ≥ 3 时残余图平衡且强连通, 遍历不完整说明内部出错。
    """
    params.require_encoder_regime()
    graph = DeBruijnGraph(params)
    _check_hamiltonian(graph, alpha)
    multiplicity = [1] * graph.n_edges
    for e in alpha:
        multiplicity[e] = 0
    beta = graph.eulerian_circuit(multiplicity, start=graph.src(alpha[0]))
    if len(beta) != graph.n_edges - graph.n_vertices:
        raise InvariantViolation(
            f"❌ 残余图遍历只覆盖了 {len(beta)} 条边, 应为 {graph.n_edges - graph.n_vertices}"
        )
    return tuple(beta)


def tie_break_span(params: CodeParams, alpha: Sequence[int], beta: Sequence[int], i: int) -> Tuple[int, int]:
    """
    γ_i 的 β 下标 (s, s')

    s 是第一个满足 src(β_s) = dest(e_i) 的下标;
    s' 是从 s 开始 (循环) 第一个满足 dest(β_s') = src(e_i) 的下标。
    """
    graph = DeBruijnGraph(params)
    if not 0 <= i <= len(alpha) - 2:
        raise FrameError(f"❌ 平局圈下标 i={i} 超出范围 0..{len(alpha) - 2}")
    edge = alpha[i]
    start = next((j for j, b in enumerate(beta) if graph.src(b) == graph.dest(edge)), None)
    if start is None:
        raise InvariantViolation(f"❌ β 中没有从 {graph.vertex_name(graph.dest(edge))} 出发的边")
    size = len(beta)
    for offset in range(size):
        j = (start + offset) % size
        if graph.dest(beta[j]) == graph.src(edge):
            return start, j
    raise InvariantViolation(f"❌ β 中没有回到 {graph.vertex_name(graph.src(edge))} 的边")


def _span_edges(beta: Sequence[int], span: Tuple[int, int]) -> Tuple[int, ...]:
    start, stop = span
    size = len(beta)
    length = (stop - start) % size + 1
    return tuple(beta[(start + k) % size] for k in range(length))


def tie_break_cycle(frame: EncodingFrame, i: int) -> Tuple[Optional[Tuple[int, int]], Tuple[int, ...]]:
    """返回 ((s, s') 或缩减模式下的 None, γ_i 的边列表)"""
    if not 0 <= i < len(frame.gammas):
        raise FrameError(f"❌ 平局圈下标 i={i} 超出范围 0..{len(frame.gammas) - 1}")
    span = frame.spans[i] if frame.spans else None
    return span, frame.gammas[i]


def validate_frame(frame: EncodingFrame) -> EncodingFrame:
    """检查所有帧不变量, 用户提供的 α/β 只有通过这里才会被使用"""
    graph = frame.graph
    params = frame.params
    params.require_encoder_regime()
    _check_hamiltonian(graph, frame.alpha)
    _check_eulerian(graph, tuple(frame.alpha) + tuple(frame.beta))

    m = graph.n_vertices
    if len(frame.gammas) != m - 1:
        raise FrameError(f"❌ 应有 {m - 1} 个平局圈, 实际 {len(frame.gammas)}")
    alpha_set = set(frame.alpha)
    for i, gamma in enumerate(frame.gammas):
        if not gamma or gamma[0] != frame.alpha[i]:
            raise FrameError(f"❌ γ_{i} 必须以 e_{i} 开头")
        for k, e in enumerate(gamma):
            if graph.dest(e) != graph.src(gamma[(k + 1) % len(gamma)]):
                raise FrameError(f"❌ γ_{i} 不是闭合路径")
        if alpha_set.intersection(gamma[1:]):
            raise FrameError(f"❌ γ_{i} 含有 e_{i} 以外的哈密顿圈边")

    if frame.reduced:
        if params.ell != 2:
            raise FrameError("❌ 缩减 Δ 模式只适用于 ℓ=2")
        if frame.delta != params.n_vertices:
            raise FrameError(f"❌ 缩减模式要求 Δ = q^(ℓ-1) = {params.n_vertices}")
        tails = [e for gamma in frame.gammas for e in gamma[1:]]
        if len(tails) != len(set(tails)):
            raise FrameError("❌ 缩减模式下各平局圈必须边不相交")
    elif frame.delta != standard_delta(params):
        raise FrameError(f"❌ Δ 应为 C(q^(ℓ-1), 2) + 1 = {standard_delta(params)}")
    return frame


def build_frame(
    params: CodeParams,
    alpha: Optional[Sequence[int]] = None,
    beta: Optional[Sequence[int]] = None,
    reduced: bool = False,
) -> EncodingFrame:
    """
    构建并校验编码帧

    Args:
        params: 码参数 (q ≥ 3)
        alpha: 哈密顿圈, 缺省为 FKM De Bruijn 序列
        beta: 欧拉扩展, 缺省为残余图上的 Hierholzer 遍历
        reduced: ℓ=2 时启用缩减 Δ 模式

    Returns:
        通过校验的 EncodingFrame
    """
    params.require_encoder_regime()
    if reduced and params.ell != 2:
        raise ParameterError("❌ 缩减 Δ 模式只适用于 ℓ=2")
    graph = DeBruijnGraph(params)
    alpha = tuple(alpha) if alpha is not None else default_hamiltonian(params)
    _check_hamiltonian(graph, alpha)
    beta = tuple(beta) if beta is not None else eulerian_extension(params, alpha)
    _check_eulerian(graph, alpha + beta)

    if reduced:
        gammas = tuple((e, graph.reverse_edge(e)) for e in alpha[:-1])
        frame = EncodingFrame(params, alpha, beta, gammas, delta=params.n_vertices, reduced=True)
    else:
        spans = tuple(tie_break_span(params, alpha, beta, i) for i in range(len(alpha) - 1))
        gammas = tuple((alpha[i],) + _span_edges(beta, span) for i, span in enumerate(spans))
        frame = EncodingFrame(params, alpha, beta, gammas, delta=standard_delta(params), spans=spans)

    logger.debug(
        f"✅ 编码帧: q={params.q}, ℓ={params.ell}, Δ={frame.delta}, "
        f"α={graph.spell(alpha)}, reduced={reduced}"
    )
    return validate_frame(frame)


def frame_from_strings(params: CodeParams, alpha: str, euler: str, reduced: bool = False) -> EncodingFrame:
    """
    从循环串形式解析帧

    alpha 的长度为 ℓ-1 的循环窗口依次是 v_0, v_1, ...; euler 必须以 alpha 开头。
    """
    graph = DeBruijnGraph(params)
    if len(alpha) != params.n_vertices:
        raise FrameError(f"❌ alpha 串长度应为 {params.n_vertices}, 实际 {len(alpha)}")
    if len(euler) != params.n_edges:
        raise FrameError(f"❌ euler 串长度应为 {params.n_edges}, 实际 {len(euler)}")
    try:
        alpha_edges = graph.cyclic_window_ids(graph.digits_of(alpha), params.ell)
        euler_edges = graph.cyclic_window_ids(graph.digits_of(euler), params.ell)
    except ValueError as e:
        raise FrameError(str(e))
    m = params.n_vertices
    if euler_edges[:m] != alpha_edges:
        raise FrameError(f"❌ euler 串 {euler!r} 必须以 alpha 串 {alpha!r} 开头")
    return build_frame(params, alpha_edges, euler_edges[m:], reduced=reduced)


def frame_to_strings(frame: EncodingFrame) -> Tuple[str, str]:
    """(alpha 串, euler 串), frame_from_strings 的逆"""
    graph = frame.graph
    return graph.spell(frame.alpha), graph.spell(frame.alpha + frame.beta)
