"""
码本大小、码率与长度界

全部为精确大整数 / 有理数; 码率用 50 位 decimal 对数计算后按四舍五入渲染。
"""
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal, localcontext
from fractions import Fraction
from typing import Dict, Optional

from scipy.special import comb, factorial

from ..config import config
from .errors import ParameterError
from .graph import CodeParams, WeightMap

LOG_PRECISION = 50

# 计算机搜索得到的数值, 桌面规模无法复现, 只用于展示
REFERENCE_ALLNODES: Dict[tuple, int] = {(3, 2): 30240, (4, 2): 1296453150720}
REFERENCE_TOTAL_FEASIBLE: Dict[tuple, int] = {(3, 2): 30240, (4, 2): 1540034496000}
REFERENCE_NOTE = "computer-search result, not reproduced at desk scale"


def catalan(q: int) -> int:
    """C_q = C(2q, q) / (q+1)"""
    return int(comb(2 * q, q, exact=True)) // (q + 1)


def local_firstnode_orderings(q: int) -> int:
    """
    单个顶点 q 条入边、q 条出边的排序中不呈现 Dyck 构型的个数

    (q!)^2·(C(2q,q) - 2·C_q) = (2q)!·(q-1)/(q+1)
    """
    q_factorial = int(factorial(q, exact=True))
    return q_factorial ** 2 * (int(comb(2 * q, q, exact=True)) - 2 * catalan(q))


def _falling(n: int, k: int) -> int:
    """n!/(n-k)!"""
    return int(factorial(n, exact=True)) // int(factorial(n - k, exact=True))


def systematic_size(params: CodeParams) -> int:
    return int(factorial(params.info_length, exact=True))


def selfloop_size(params: CodeParams) -> int:
    """M = (N-q)!·q^ℓ!/(q^ℓ-q)!"""
    q = params.q
    return int(factorial(params.info_length - q, exact=True)) * _falling(params.n_edges, q)


def firstnode_size(params: CodeParams) -> int:
    """(N+1-q)!·(q-1)/(q+1)·q^ℓ!/(q^ℓ-q)!"""
    q = params.q
    value = Fraction(int(factorial(params.info_length + 1 - q, exact=True)) * _falling(params.n_edges, q))
    value *= Fraction(q - 1, q + 1)
    if value.denominator != 1:
        raise ParameterError(f"❌ 首顶点码本大小不是整数: {value}")
    return value.numerator


def prior_work_size(params: CodeParams) -> int:
    """30240·Π_{j=4}^{q} j!·C(j²-j+1, j) · Π_{i=3}^{ℓ} (q!)^(q^(i-1) - 2q^(i-2) + q^(i-3))"""
    q, ell = params.q, params.ell
    size = 30240
    for j in range(4, q + 1):
        size *= int(factorial(j, exact=True)) * int(comb(j * j - j + 1, j, exact=True))
    q_factorial = int(factorial(q, exact=True))
    for i in range(3, ell + 1):
        size *= q_factorial ** (q ** (i - 1) - 2 * q ** (i - 2) + q ** (i - 3))
    return size


def rate(size: int, params: CodeParams, digits: Optional[int] = None) -> Decimal:
    """log M / log((q^ℓ)!), 按 digits 位小数四舍五入"""
    digits = config.RATE_DIGITS if digits is None else digits
    with localcontext() as ctx:
        ctx.prec = LOG_PRECISION
        ratio = Decimal(size).ln() / Decimal(int(factorial(params.n_edges, exact=True))).ln()
        return ratio.quantize(Decimal(1).scaleb(-digits), rounding=ROUND_HALF_UP)


@dataclass(frozen=True)
class CodeSizeReport:
    q: int
    ell: int
    info_length: int
    catalan: int
    systematic: int
    selfloop_M: int
    firstnode: int
    prior_work: int
    allnodes_reference: Optional[int] = None
    total_feasible_reference: Optional[int] = None
    rates: Dict[str, Decimal] = field(default_factory=dict)


def code_sizes(params: CodeParams) -> CodeSizeReport:
    """
    各构造的码本大小与码率

    Args:
        params: q ≥ 3, ℓ ≥ 2

    Returns:
        CodeSizeReport
    """
    params.require_encoder_regime()
    key = (params.q, params.ell)
    sizes = {
        "systematic": systematic_size(params),
        "selfloop_M": selfloop_size(params),
        "firstnode": firstnode_size(params),
        "prior_work": prior_work_size(params),
    }
    references = {
        "allnodes_reference": REFERENCE_ALLNODES.get(key),
        "total_feasible_reference": REFERENCE_TOTAL_FEASIBLE.get(key),
    }
    rates = {name: rate(value, params) for name, value in sizes.items()}
    rates.update({name: rate(value, params) for name, value in references.items() if value})
    return CodeSizeReport(
        q=params.q,
        ell=params.ell,
        info_length=params.info_length,
        catalan=catalan(params.q),
        rates=rates,
        **sizes,
        **references,
    )


@dataclass(frozen=True)
class LengthBounds:
    upper: int
    path_weight: int
    lower: int
    k_max: int
    reduced_upper: Optional[Fraction] = None
    prior_work_upper: Optional[Fraction] = None


def prior_work_length_bound(params: CodeParams) -> Fraction:
    """递归构造的字符串长度上界 (只用于对比)"""
    q, ell = params.q, params.ell
    q_factorial = int(factorial(q, exact=True))
    q1_factorial = int(factorial(q + 1, exact=True))
    if ell == 2:
        return Fraction(q * q * 16 * q_factorial * q1_factorial, 6 * 24) * Fraction(2) ** (q - 3)
    return (
        Fraction(16 * q_factorial * q1_factorial, 144 * q * q)
        * Fraction(2) ** (q - 4)
        * 3 ** (ell - 2)
        * q ** (ell * (q * q + 1))
    )


def length_bounds(params: CodeParams, reduced: bool = False) -> LengthBounds:
    """
    Returns:
        upper = q^(5ℓ); path_weight = C(N+1, 2) (平衡后哈密顿路径边的界);
        lower = C(q^ℓ+1, 2); k_max = N; reduced 且 ℓ=2 时给出 3/2·q^6 + 2q^3
    """
    q = params.q
    reduced_upper = None
    if reduced and params.ell == 2:
        reduced_upper = Fraction(3, 2) * q ** 6 + 2 * q ** 3
    return LengthBounds(
        upper=q ** (5 * params.ell),
        path_weight=int(comb(params.info_length + 1, 2, exact=True)),
        lower=int(comb(params.n_edges + 1, 2, exact=True)),
        k_max=params.info_length,
        reduced_upper=reduced_upper,
        prior_work_upper=prior_work_length_bound(params),
    )


def verify_length(x: WeightMap, params: Optional[CodeParams] = None, reduced: bool = False) -> bool:
    """wt(E) 不超过适用的上界"""
    params = params or x.params
    bounds = length_bounds(params, reduced)
    limit = bounds.reduced_upper if bounds.reduced_upper is not None else bounds.upper
    return x.total() <= limit
