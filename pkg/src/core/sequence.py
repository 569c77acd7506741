"""
字符串 <-> profile 向量

profile 向量按循环窗口计数; 反方向用带重数计数器的 Hierholzer 遍历构造一个实现该向量的字符串。
"""
from typing import Dict, Optional, Tuple, Union

import numpy as np
from loguru import logger

from .errors import GramError, InvariantViolation, ParameterError, WeightError
from .graph import DNA_ALPHABET, CodeParams, DeBruijnGraph, WeightMap, default_alphabet

FASTA_WIDTH = 60


def infer_alphabet(s: str) -> Tuple[str, ...]:
    """包含 s 全部符号的最小默认字母表"""
    symbols = set(s)
    for q in range(2, 27):
        alphabet = default_alphabet(q)
        if symbols <= set(alphabet):
            return tuple(alphabet)
    raise GramError(f"❌ 字符串含有默认字母表以外的符号: {sorted(symbols)}")


def infer_params(s: str, ell: int) -> CodeParams:
    alphabet = infer_alphabet(s)
    return CodeParams.create(len(alphabet), ell, alphabet)


def _symbol_codes(s: str, alphabet) -> np.ndarray:
    index = {symbol: i for i, symbol in enumerate(alphabet)}
    foreign = sorted(set(s) - set(index))
    if foreign:
        raise GramError(f"❌ 字符串含有字母表外的符号: {foreign}")
    return np.fromiter((index[c] for c in s), dtype=np.int64, count=len(s))


def profile_counts(s: str, ell: int, alphabet) -> np.ndarray:
    """
    循环 ℓ-gram 计数 (任意 ℓ ≥ 1)

    Args:
        s: 字符串, |s| ≥ 1
        ell: 窗口长度
        alphabet: 有序字母表

    Returns:
        长度 q^ℓ 的计数数组, 下标是 q 进制 gram 编号
    """
    if not s:
        raise GramError("❌ 字符串不能为空")
    if ell < 1:
        raise ParameterError(f"❌ 窗口长度 ℓ 必须 ≥ 1, 当前 {ell}")
    q = len(alphabet)
    codes = _symbol_codes(s, alphabet)
    ids = np.zeros(len(codes), dtype=np.int64)
    for k in range(ell):
        # 第 k 个符号 (循环), 首符号为最高位
        ids = ids * q + np.roll(codes, -k)
    return np.bincount(ids, minlength=q ** ell)


def profile_map(s: str, ell: int, alphabet) -> Dict[str, int]:
    """{gram: 计数}, 按字典序包含全部 q^ℓ 个 gram"""
    counts = profile_counts(s, ell, alphabet)
    q = len(alphabet)
    result = {}
    for e, count in enumerate(counts.tolist()):
        digits = []
        for _ in range(ell):
            e, digit = divmod(e, q)
            digits.append(alphabet[digit])
        result["".join(reversed(digits))] = count
    return result


def profile_vector(s: str, ell: int, params: Optional[CodeParams] = None) -> Union[WeightMap, Dict[str, int]]:
    """
    p_{s,ℓ}: 循环窗口计数, Σ p(w) = |s|

    Args:
        s: 字符串
        ell: 窗口长度; ℓ=1 时没有对应的 De Bruijn 图, 返回 profile_map 的 {符号: 计数}
        params: 缺省时取包含 s 全部符号的最小默认字母表
    """
    if ell == 1:
        return profile_map(s, 1, params.alphabet if params is not None else infer_alphabet(s))
    if params is None:
        params = infer_params(s, ell)
    elif params.ell != ell:
        raise ParameterError(f"❌ params.ell={params.ell} 与 ℓ={ell} 不一致")
    counts = profile_counts(s, ell, params.alphabet)
    return WeightMap.from_ints(params, counts.tolist())


def realize_string(x: WeightMap) -> str:
    """
    构造 profile 向量恰为 x 的字符串

    x 必须全为正整数且平衡; 每条边走 x(e) 次的欧拉回路从顶点 0 出发,
    同一顶点总是优先走编号最小的边, 输出确定但不唯一。
    """
    if not x.is_profile():
        raise WeightError("❌ 只有全为正整数的 profile 向量才能实现为字符串")
    graph = DeBruijnGraph(x.params)
    if not graph.is_balanced(x):
        raise WeightError("❌ 加权 De Bruijn 图不平衡, 不存在对应的字符串")
    total = x.total()
    circuit = graph.eulerian_circuit(x.as_ints(), start=0)
    if len(circuit) != total:
        raise InvariantViolation(f"❌ 欧拉回路只覆盖了 {len(circuit)} / {total} 条边")
    symbols = np.array(x.params.alphabet)
    first = np.asarray(circuit, dtype=np.int64) // x.params.n_vertices
    s = "".join(symbols[first].tolist())
    logger.debug(f"✅ 实现字符串: 长度 {len(s)}")
    return s


def to_fasta(s: str, header: str = "rankmod", width: int = FASTA_WIDTH) -> str:
    """FASTA 文本 (只用于 ACGT 字符串)"""
    foreign = sorted(set(s) - set(DNA_ALPHABET))
    if foreign:
        raise GramError(f"❌ FASTA 输出只支持 ACGT, 发现 {foreign}")
    lines = [f">{header}"]
    lines.extend(s[i:i + width] for i in range(0, len(s), width))
    return "\n".join(lines) + "\n"
