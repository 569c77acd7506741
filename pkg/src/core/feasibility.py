"""
可行性判定: profile 向量 / 排列的可行性, Dyck 构型检查, 小规模穷举

排列 π 可行 ⟺ 存在正整数、平衡且满足 x ⊨ π 的权重。判定方法是精确有理数线性规划:
令 σ_j 为排名 j 的边, 代换
    y_0 = x_{σ_0} - 1,  y_j = x_{σ_j} - x_{σ_{j-1}} - 1   (全部 ≥ 0)
则顶点 v 的平衡条件变为
    Σ_j f_v(j)·y_j = -Σ_j f_v(j),  f_v(j) = |E_in(v) ∩ 排名≥j| - |E_out(v) ∩ 排名≥j|
间隔为 1 的约束使有理可行与整数可行等价: 有理解乘以分母的最小公倍数后,
顺序、正性、平衡都保持不变。
"""
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import factorial, gcd
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from loguru import logger

from ..config import config
from .errors import InvariantViolation, ParameterError, RankingError, ResourceLimitError, WeightError
from .graph import CodeParams, DeBruijnGraph, Ranking, WeightMap
from .simplex import ExactSimplex

RankedValues = Union[Ranking, WeightMap]

SINGLETONS = "singletons"
ALL_SUBSETS = "all_subsets"


@dataclass(frozen=True)
class FeasibilityWitness:
    """证明 π 可行的具体 profile 向量"""

    profile: WeightMap
    ranking: Ranking


# ============================================================
# profile 向量
# ============================================================


def is_feasible_vector(x: WeightMap) -> bool:
    """正整数向量可行 ⟺ 加权 De Bruijn 图平衡"""
    if not x.is_complete():
        raise WeightError("❌ 可行性判定需要全部 q^ℓ 条边的权重")
    for e, value in enumerate(x.values):
        if not isinstance(value, int) or value <= 0:
            name = DeBruijnGraph(x.params).edge_name(e)
            raise WeightError(f"❌ 边 {name} 的权重 {value} 不是正整数")
    return DeBruijnGraph(x.params).is_balanced(x)


# ============================================================
# 排列的 LP 判定
# ============================================================


def incidence_signs(graph: DeBruijnGraph) -> List[List[int]]:
    """signs[v][e] = +1 (e 进入 v), -1 (e 离开 v), 自环为 0"""
    table = [[0] * graph.n_edges for _ in graph.vertices()]
    for e in graph.edges():
        if graph.is_self_loop(e):
            continue
        table[graph.dest(e)][e] += 1
        table[graph.src(e)][e] -= 1
    return table


def suffix_table(graph: DeBruijnGraph, order: Sequence[int], signs: Optional[List[List[int]]] = None) -> List[List[int]]:
    """
    f_v(j) 表: 排名 ≥ j 的边中, 进入 v 的条数减去离开 v 的条数

    同一张表同时给出 LP 约束行和单点 Dyck 检查。
    """
    signs = signs if signs is not None else incidence_signs(graph)
    table = []
    for v in graph.vertices():
        row = signs[v]
        running = 0
        suffix = [0] * len(order)
        for j in range(len(order) - 1, -1, -1):
            running += row[order[j]]
            suffix[j] = running
        table.append(suffix)
    return table


def _has_singleton_dyck(table: Sequence[Sequence[int]]) -> bool:
    """单点割 {v} 是 Dyck 构型 ⟺ f_v 不变号"""
    for suffix in table:
        if all(value <= 0 for value in suffix) or all(value >= 0 for value in suffix):
            return True
    return False


def _solve_order(order: Sequence[int], table: Sequence[Sequence[int]]) -> Optional[List[int]]:
    """按排名顺序求整数见证, 返回按排名排列的权重 (不可行时 None)"""
    n = len(order)
    # y_0 的系数 f_v(0) 恒为 0; 最后一个顶点的行是其余行之和的相反数
    rows = [list(suffix[1:]) for suffix in table[:-1]]
    rhs = [-sum(suffix) for suffix in table[:-1]]
    solution = ExactSimplex(rows, rhs).solve()
    if solution is None:
        return None

    values: List[Fraction] = []
    running = Fraction(0)
    for j in range(n):
        if j > 0:
            running += solution[j - 1]
        values.append(j + 1 + running)
    lcm = 1
    for value in values:
        lcm = lcm * value.denominator // gcd(lcm, value.denominator)
    scaled = [int(value * lcm) for value in values]
    divisor = 0
    for value in scaled:
        divisor = gcd(divisor, value)
    return [value // divisor for value in scaled]


def is_feasible_ranking(params: CodeParams, pi: Ranking) -> Optional[FeasibilityWitness]:
    """
    精确 LP 判定全排列 π 是否可行

    Args:
        params: 码参数
        pi: 定义在全部 q^ℓ 条边上的排名

    Returns:
        可行时返回见证 (正整数、平衡、⊨ π), 否则 None
    """
    if not pi.is_total():
        raise RankingError(f"❌ 可行性判定需要全排列, 当前只排了 {len(pi)} / {params.n_edges} 条边")
    graph = DeBruijnGraph(params)
    table = suffix_table(graph, pi.order)
    by_rank = _solve_order(pi.order, table)
    if by_rank is None:
        return None
    profile = WeightMap.from_mapping(params, dict(zip(pi.order, by_rank)))
    witness = FeasibilityWitness(profile=profile, ranking=pi)
    if not graph.is_balanced(profile) or Ranking.from_weights(profile) != pi:
        raise InvariantViolation("❌ LP 见证未通过平衡/顺序校验")
    return witness


# ============================================================
# Dyck 构型
# ============================================================


def is_dyck_word(word: str) -> bool:
    """
    长度相等的 0/1 串, 任一方向的所有前缀都满足计数不降 (0 在前或 1 在前)
    """
    if word.count("0") != word.count("1"):
        return False
    low = high = 0
    balance = 0
    for symbol in word:
        if symbol not in "01":
            raise ParameterError(f"❌ Dyck 词只能包含 0 和 1: {word!r}")
        balance += 1 if symbol == "0" else -1
        low = min(low, balance)
        high = max(high, balance)
    return low >= 0 or high <= 0


def _value_table(values: RankedValues) -> Dict[int, object]:
    if isinstance(values, Ranking):
        return values.to_mapping()
    return {e: values.get(e) for e in values.defined_edges()}


def cut_word(params: CodeParams, values: RankedValues, vertices) -> str:
    """
    割边按权重 (或排名) 升序排列后的指示串: 0 = 入边, 1 = 出边
    """
    graph = DeBruijnGraph(params)
    incoming, outgoing = graph.cut_edges(vertices)
    table = _value_table(values)
    labelled = []
    for e, symbol in [(e, "0") for e in incoming] + [(e, "1") for e in outgoing]:
        if e not in table:
            raise RankingError(f"❌ 割边 {graph.edge_name(e)} 没有排名/权重")
        labelled.append((table[e], symbol))
    keys = [key for key, _ in labelled]
    if len(set(keys)) != len(keys):
        raise WeightError("❌ 割边中存在相同权重, Dyck 构型未定义")
    return "".join(symbol for _, symbol in sorted(labelled))


def dyck_at(params: CodeParams, values: RankedValues, vertices) -> bool:
    return is_dyck_word(cut_word(params, values, vertices))


def candidate_cuts(params: CodeParams, mode: str) -> List[Tuple[int, ...]]:
    """singletons: 每个 {v}; all_subsets: 全部非空真子集 (受顶点数上限保护)"""
    graph = DeBruijnGraph(params)
    if mode == SINGLETONS:
        return [(v,) for v in graph.vertices()]
    if mode != ALL_SUBSETS:
        raise ParameterError(f"❌ 未知的 Dyck 检查模式: {mode}")
    if graph.n_vertices > config.DYCK_SUBSET_LIMIT:
        raise ResourceLimitError(
            f"❌ all_subsets 模式最多支持 {config.DYCK_SUBSET_LIMIT} 个顶点, 当前 {graph.n_vertices}"
        )
    cuts = []
    for size in range(1, graph.n_vertices):
        cuts.extend(combinations(graph.vertices(), size))
    return cuts


def dyck_report(params: CodeParams, values: RankedValues, mode: str = SINGLETONS) -> List[Tuple[Tuple[int, ...], str, bool]]:
    """每个候选割的 (顶点集合, 指示串, 是否 Dyck)"""
    report = []
    for cut in candidate_cuts(params, mode):
        word = cut_word(params, values, cut)
        report.append((cut, word, is_dyck_word(word)))
    return report


def dyck_necessary_check(params: CodeParams, pi: RankedValues, mode: str = SINGLETONS) -> bool:
    """
    没有任何候选割呈现 Dyck 构型时返回 True

    这只是可行的必要条件, 通过检查并不代表可行。
    """
    return not any(is_dyck for _, _, is_dyck in dyck_report(params, pi, mode))


def count_non_dyck_orderings(q: int) -> int:
    """
    q 条入边、q 条出边 (互不相同) 的全部 (2q)! 种排序中, 不呈现 Dyck 构型的个数

    按 0/1 串穷举, 每个串对应 q!·q! 种排序。
    """
    good = 0
    for zeros in combinations(range(2 * q), q):
        word = ["1"] * (2 * q)
        for position in zeros:
            word[position] = "0"
        if not is_dyck_word("".join(word)):
            good += 1
    return good * factorial(q) ** 2


# ============================================================
# 穷举
# ============================================================


def unrank_permutation(index: int, n: int) -> List[int]:
    """字典序第 index 个 (0..n!-1) 排列, 阶乘进制展开"""
    pool = list(range(n))
    result = []
    for k in range(n, 0, -1):
        digit, index = divmod(index, factorial(k - 1))
        result.append(pool.pop(digit))
    return result


def next_permutation(items: List[int]) -> bool:
    """原地变为字典序下一个排列; 已是最后一个时返回 False"""
    i = len(items) - 2
    while i >= 0 and items[i] >= items[i + 1]:
        i -= 1
    if i < 0:
        return False
    j = len(items) - 1
    while items[j] <= items[i]:
        j -= 1
    items[i], items[j] = items[j], items[i]
    items[i + 1:] = reversed(items[i + 1:])
    return True


def iter_feasible(
    params: CodeParams,
    start: int = 0,
    stop: Optional[int] = None,
    prefilter: bool = True,
) -> Iterator[Tuple[int, ...]]:
    """
    按字典序遍历下标 [start, stop) 的全排列, 产出可行排列 (order 元组)

    prefilter 为 True 时先做单点 Dyck 检查, 这一步不会错杀 (Dyck 构型蕴含不可行)。
    """
    graph = DeBruijnGraph(params)
    n = graph.n_edges
    stop = factorial(n) if stop is None else min(stop, factorial(n))
    if start >= stop:
        return
    signs = incidence_signs(graph)
    order = unrank_permutation(start, n)
    for _ in range(start, stop):
        table = suffix_table(graph, order, signs)
        if not (prefilter and _has_singleton_dyck(table)):
            if _solve_order(order, table) is not None:
                yield tuple(order)
        next_permutation(order)


def _scan_range(
    q: int, ell: int, alphabet: Tuple[str, ...], start: int, stop: int, prefilter: bool, collect: bool
) -> Tuple[int, List[Tuple[int, ...]]]:
    """工作进程入口: 统计一个下标区间"""
    params = CodeParams(q=q, ell=ell, alphabet=alphabet)
    count = 0
    found: List[Tuple[int, ...]] = []
    for order in iter_feasible(params, start, stop, prefilter):
        count += 1
        if collect:
            found.append(order)
    return count, found


@dataclass(frozen=True)
class EnumerationResult:
    count: int
    total: int
    elapsed: float
    rankings: Tuple[Ranking, ...] = ()


def split_ranges(total: int, parts: int) -> List[Tuple[int, int]]:
    parts = max(1, min(parts, total))
    size, extra = divmod(total, parts)
    ranges = []
    start = 0
    for k in range(parts):
        stop = start + size + (1 if k < extra else 0)
        ranges.append((start, stop))
        start = stop
    return ranges


def check_enumeration_limit(params: CodeParams, force: bool = False):
    if params.n_edges > config.ENUMERATION_LIMIT and not force:
        raise ResourceLimitError(
            f"❌ 全排列穷举需要 ({params.n_edges})! 次判定, 超过上限 q^ℓ ≤ {config.ENUMERATION_LIMIT}; "
            f"如确需运行请使用 force"
        )


def _emit(params: CodeParams, orders: Iterable[Tuple[int, ...]], on_ranking: Callable[[Ranking], None]) -> int:
    count = 0
    for order in orders:
        on_ranking(Ranking(params, order))
        count += 1
    return count


def enumerate_feasible(
    params: CodeParams,
    count_only: bool = True,
    parallel: int = 1,
    dyck_prefilter: bool = True,
    force: bool = False,
    chunks: Optional[int] = None,
    on_chunk: Optional[Callable[[int, int], None]] = None,
    on_ranking: Optional[Callable[[Ranking], None]] = None,
) -> EnumerationResult:
    """
    穷举全部 (q^ℓ)! 个排列并统计可行的个数

    Args:
        params: 码参数
        count_only: False 时同时返回全部可行排列
        parallel: 工作进程数, 按字典序下标区间切分, 结果求和
        dyck_prefilter: 是否先做单点 Dyck 预筛
        force: 跳过资源上限检查
        chunks: 区间个数 (缺省为 parallel 的 4 倍, 用于进度显示)
        on_chunk: 每完成一个区间回调 (已完成区间数, 总区间数)
        on_ranking: 按字典序对每个可行排列回调; 内存中最多保留一个区间的结果

    Returns:
        EnumerationResult
    """
    check_enumeration_limit(params, force)
    total = factorial(params.n_edges)
    parallel = max(1, parallel)
    ranges = split_ranges(total, chunks or parallel * 4)
    collect = not count_only
    logger.info(
        f"🚀 穷举 q={params.q}, ℓ={params.ell}: {total} 个排列, "
        f"{len(ranges)} 个区间, {parallel} 个进程, 预筛={'开' if dyck_prefilter else '关'}"
    )
    started = time.time()
    args = [
        (params.q, params.ell, params.alphabet, a, b, dyck_prefilter, collect or on_ranking is not None)
        for a, b in ranges
    ]

    count = 0
    kept: List[Ranking] = []

    def absorb(found: int, orders: List[Tuple[int, ...]]):
        nonlocal count
        count += found
        if on_ranking is not None:
            _emit(params, orders, on_ranking)
        if collect:
            kept.extend(Ranking(params, order) for order in orders)

    if parallel == 1:
        for done, (a, b) in enumerate(ranges, 1):
            if on_ranking is not None and not collect:
                count += _emit(params, iter_feasible(params, a, b, dyck_prefilter), on_ranking)
            else:
                absorb(*_scan_range(*args[done - 1]))
            if on_chunk:
                on_chunk(done, len(args))
    else:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            futures = [pool.submit(_scan_range, *arg) for arg in args]
            for done, future in enumerate(futures, 1):
                absorb(*future.result())
                if on_chunk:
                    on_chunk(done, len(args))

    elapsed = time.time() - started
    logger.info(f"✅ 可行排列: {count} / {total} (⏱️ {elapsed:.1f}s)")
    return EnumerationResult(count=count, total=total, elapsed=elapsed, rankings=tuple(kept))
