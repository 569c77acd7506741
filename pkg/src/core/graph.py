"""
De Bruijn 图 G_{q,ℓ-1} 的整数算术、割边提取与平衡检查

顶点 = (ℓ-1)-gram, 边 = ℓ-gram, 均以 q 进制整数编号 (首字母为最高位)。
邻接关系完全由算术给出, 不存储图:
  src(e)  = e // q            (去掉最后一个字母)
  dest(e) = e mod q^(ℓ-1)     (去掉第一个字母)
gram 字符串只出现在 I/O 边界。
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import GramError, ParameterError, RankingError, WeightError

Number = Union[int, Fraction]

DNA_ALPHABET = "ACGT"
LATIN_ALPHABET = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


def default_alphabet(q: int) -> Tuple[str, ...]:
    """q ≤ 4 取 ACGT 的前缀 (q=3 → A,C,G), 否则取 A..Z 的前 q 个字母"""
    if q < 2:
        raise ParameterError(f"❌ 字母表大小 q 必须 ≥ 2, 当前 q={q}")
    if q <= len(DNA_ALPHABET):
        return tuple(DNA_ALPHABET[:q])
    if q <= len(LATIN_ALPHABET):
        return tuple(LATIN_ALPHABET[:q])
    raise ParameterError(f"❌ q={q} 超过默认字母表长度, 请显式提供 alphabet")


def normalize(value: Number) -> Number:
    """整值的 Fraction 统一转成 int"""
    if isinstance(value, Fraction) and value.denominator == 1:
        return value.numerator
    return value


@dataclass(frozen=True)
class CodeParams:
    """码参数: 字母表 Σ, q=|Σ|, 窗口长度 ℓ"""

    q: int
    ell: int
    alphabet: Tuple[str, ...]

    def __post_init__(self):
        if self.q < 2:
            raise ParameterError(f"❌ q 必须 ≥ 2, 当前 q={self.q}")
        if self.ell < 2:
            raise ParameterError(f"❌ ℓ 必须 ≥ 2, 当前 ℓ={self.ell}")
        if len(self.alphabet) != self.q:
            raise ParameterError(
                f"❌ 字母表长度 {len(self.alphabet)} 与 q={self.q} 不一致"
            )
        if len(set(self.alphabet)) != self.q:
            raise ParameterError(f"❌ 字母表符号必须互不相同: {self.alphabet}")
        if any(len(symbol) != 1 for symbol in self.alphabet):
            raise ParameterError(f"❌ 字母表符号必须是单个字符: {self.alphabet}")

    @classmethod
    def create(cls, q: int, ell: int, alphabet: Optional[Sequence[str]] = None) -> "CodeParams":
        symbols = tuple(alphabet) if alphabet is not None else default_alphabet(q)
        return cls(q=q, ell=ell, alphabet=symbols)

    @property
    def n_vertices(self) -> int:
        return self.q ** (self.ell - 1)

    @property
    def n_edges(self) -> int:
        return self.q ** self.ell

    @property
    def info_length(self) -> int:
        """系统码信息集大小 N = q^ℓ - q^(ℓ-1) + 1"""
        return self.n_edges - self.n_vertices + 1

    @cached_property
    def symbol_index(self) -> Dict[str, int]:
        return {symbol: i for i, symbol in enumerate(self.alphabet)}

    def require_encoder_regime(self):
        if self.q < 3:
            raise ParameterError(f"❌ 编码器要求 q ≥ 3, 当前 q={self.q}")


@dataclass(frozen=True)
class DeBruijnGraph:
    """G_{q,ℓ-1}: |V| = q^(ℓ-1), |E| = q^ℓ, 每个顶点入度=出度=q"""

    params: CodeParams

    @property
    def q(self) -> int:
        return self.params.q

    @property
    def n_vertices(self) -> int:
        return self.params.n_vertices

    @property
    def n_edges(self) -> int:
        return self.params.n_edges

    def vertices(self) -> range:
        return range(self.n_vertices)

    def edges(self) -> range:
        return range(self.n_edges)

    # --- 编号算术 ---

    def _check_vertex(self, v: int):
        if not 0 <= v < self.n_vertices:
            raise GramError(f"❌ 顶点编号越界: {v} (共 {self.n_vertices} 个顶点)")

    def _check_edge(self, e: int):
        if not 0 <= e < self.n_edges:
            raise GramError(f"❌ 边编号越界: {e} (共 {self.n_edges} 条边)")

    def src(self, e: int) -> int:
        return e // self.q

    def dest(self, e: int) -> int:
        return e % self.n_vertices

    def edge_between(self, u: int, v: int) -> int:
        """u→v 的边编号 (要求 v 是 u 左移一位后的后继)"""
        e = u * self.q + v % self.q
        if self.dest(e) != v:
            raise GramError(
                f"❌ {self.vertex_name(u)} → {self.vertex_name(v)} 不是 De Bruijn 图中的边"
            )
        return e

    def is_self_loop(self, e: int) -> bool:
        return self.src(e) == self.dest(e)

    def self_loops(self) -> Tuple[int, ...]:
        """a^ℓ 形式的 q 条自环"""
        unit = (self.n_edges - 1) // (self.q - 1)
        return tuple(a * unit for a in range(self.q))

    def reverse_edge(self, e: int) -> int:
        """ℓ=2 时 ab 的反向边 ba"""
        if self.params.ell != 2:
            raise ParameterError("❌ 反向边只在 ℓ=2 时有定义")
        return self.edge_between(self.dest(e), self.src(e))

    # --- gram 字符串 <-> 编号 ---

    def _parse(self, gram: str, length: int, kind: str) -> int:
        if len(gram) != length:
            raise GramError(f"❌ {kind} {gram!r} 长度应为 {length}")
        index = self.params.symbol_index
        value = 0
        for symbol in gram:
            if symbol not in index:
                raise GramError(f"❌ {kind} {gram!r} 含有字母表外的符号 {symbol!r}")
            value = value * self.q + index[symbol]
        return value

    def _render(self, value: int, length: int) -> str:
        symbols = []
        for _ in range(length):
            value, digit = divmod(value, self.q)
            symbols.append(self.params.alphabet[digit])
        return "".join(reversed(symbols))

    def edge_id(self, gram: str) -> int:
        return self._parse(gram, self.params.ell, "边")

    def edge_name(self, e: int) -> str:
        self._check_edge(e)
        return self._render(e, self.params.ell)

    def vertex_id(self, gram: str) -> int:
        return self._parse(gram, self.params.ell - 1, "顶点")

    def vertex_name(self, v: int) -> str:
        self._check_vertex(v)
        return self._render(v, self.params.ell - 1)

    # --- 邻接 ---

    def in_edges(self, v: int) -> Tuple[int, ...]:
        """E_in(v): dest(e)=v 的 q 条边 (v=a^(ℓ-1) 时含自环)"""
        self._check_vertex(v)
        return tuple(a * self.n_vertices + v for a in range(self.q))

    def out_edges(self, v: int) -> Tuple[int, ...]:
        self._check_vertex(v)
        return tuple(v * self.q + a for a in range(self.q))

    def cut_edges(self, vertices: Iterable[int]) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        """
        集合级割边 E_in(U), E_out(U); U 内部的边 (含自环) 不计入

        Returns:
            (incoming, outgoing), 各自按边编号升序
        """
        members = frozenset(vertices)
        if not members:
            raise GramError("❌ 割的顶点集合不能为空")
        for v in members:
            self._check_vertex(v)
        if len(members) == self.n_vertices:
            raise GramError("❌ 割的顶点集合不能是全部顶点")
        incoming = []
        outgoing = []
        for v in sorted(members):
            incoming.extend(e for e in self.in_edges(v) if self.src(e) not in members)
            outgoing.extend(e for e in self.out_edges(v) if self.dest(e) not in members)
        return tuple(sorted(incoming)), tuple(sorted(outgoing))

    # --- 平衡 ---

    def balance_defect(self, weights: "WeightMap", v: int) -> Number:
        """defect(v) = wt(E_in(v)) - wt(E_out(v)); 自环两边抵消, 不参与计算 (可以未赋值)"""
        incoming = sum(weights[e] for e in self.in_edges(v) if not self.is_self_loop(e))
        outgoing = sum(weights[e] for e in self.out_edges(v) if not self.is_self_loop(e))
        return normalize(incoming - outgoing)

    def is_balanced(self, weights: "WeightMap") -> bool:
        if not weights.is_complete():
            raise WeightError("❌ 平衡检查需要全部 q^ℓ 条边的权重")
        return all(self.balance_defect(weights, v) == 0 for v in self.vertices())

    def cut_weights(self, weights: "WeightMap", vertices: Iterable[int]) -> Tuple[Number, Number]:
        """(wt(E_in(U)), wt(E_out(U)))"""
        incoming, outgoing = self.cut_edges(vertices)
        return (
            normalize(sum(weights[e] for e in incoming)),
            normalize(sum(weights[e] for e in outgoing)),
        )

    # --- 遍历 ---

    def eulerian_circuit(self, multiplicity: Sequence[int], start: int = 0) -> List[int]:
        """
        Hierholzer 欧拉回路: 边 e 恰好走 multiplicity[e] 次

        不展开平行边, 每个顶点只保留一个指向"下一条还有剩余次数的边"的指针;
        同一顶点总是优先走编号最小的边, 输出确定。

        Args:
            multiplicity: 每条边的重数 (0 表示不存在)
            start: 起点顶点

        Returns:
            边编号序列; 调用方负责检查长度是否等于 sum(multiplicity)
        """
        self._check_vertex(start)
        remaining = list(multiplicity)
        cursor = [0] * self.n_vertices
        stack: List[Tuple[int, Optional[int]]] = [(start, None)]
        circuit: List[int] = []
        while stack:
            v, via = stack[-1]
            while cursor[v] < self.q and remaining[v * self.q + cursor[v]] == 0:
                cursor[v] += 1
            if cursor[v] < self.q:
                e = v * self.q + cursor[v]
                remaining[e] -= 1
                stack.append((self.dest(e), e))
            else:
                stack.pop()
                if via is not None:
                    circuit.append(via)
        circuit.reverse()
        return circuit

    def cyclic_window_ids(self, digits: Sequence[int], width: int) -> List[int]:
        """循环串 digits 的全部长度为 width 的窗口 (q 进制编号)"""
        size = len(digits)
        if size == 0:
            return []
        ids = []
        for i in range(size):
            value = 0
            for k in range(width):
                value = value * self.q + digits[(i + k) % size]
            ids.append(value)
        return ids

    def digits_of(self, text: str) -> List[int]:
        index = self.params.symbol_index
        missing = sorted({symbol for symbol in text if symbol not in index})
        if missing:
            raise GramError(f"❌ 字符串含有字母表外的符号: {missing}")
        return [index[symbol] for symbol in text]

    def spell(self, edges: Sequence[int]) -> str:
        """边序列 -> 循环串 (每条边取首字母)"""
        return "".join(self.edge_name(e)[0] for e in edges)


@dataclass(frozen=True)
class WeightMap:
    """
    边编号 -> 精确权重 (int 或 Fraction), 未赋值的边为 None

    所有表示之间的转换都是精确的: 整数 / 固定分母的缩放整数 / 任意有理数。
    """

    params: CodeParams
    values: Tuple[Optional[Number], ...]

    def __post_init__(self):
        if len(self.values) != self.params.n_edges:
            raise WeightError(
                f"❌ 权重向量长度 {len(self.values)} 与 q^ℓ={self.params.n_edges} 不一致"
            )

    @classmethod
    def from_ints(cls, params: CodeParams, values: Sequence[int]) -> "WeightMap":
        return cls(params, tuple(int(v) for v in values))

    @classmethod
    def from_mapping(cls, params: CodeParams, values: Mapping[int, Number]) -> "WeightMap":
        dense: List[Optional[Number]] = [None] * params.n_edges
        for e, value in values.items():
            if not 0 <= e < params.n_edges:
                raise WeightError(f"❌ 边编号越界: {e}")
            dense[e] = normalize(value)
        return cls(params, tuple(dense))

    @classmethod
    def from_scaled(cls, params: CodeParams, numerators: Sequence[int], denominator: int) -> "WeightMap":
        """固定分母表示: 权重 = numerator / denominator"""
        if denominator <= 0:
            raise WeightError(f"❌ 分母必须为正: {denominator}")
        return cls(params, tuple(normalize(Fraction(n, denominator)) for n in numerators))

    @classmethod
    def from_grams(cls, params: CodeParams, values: Mapping[str, Number]) -> "WeightMap":
        graph = DeBruijnGraph(params)
        return cls.from_mapping(params, {graph.edge_id(g): v for g, v in values.items()})

    def __getitem__(self, e: int) -> Number:
        value = self.values[e]
        if value is None:
            raise WeightError(f"❌ 边 {DeBruijnGraph(self.params).edge_name(e)} 没有权重")
        return value

    def get(self, e: int) -> Optional[Number]:
        return self.values[e]

    def __len__(self) -> int:
        return len(self.values)

    def defined_edges(self) -> Tuple[int, ...]:
        return tuple(e for e, value in enumerate(self.values) if value is not None)

    def is_complete(self) -> bool:
        return all(value is not None for value in self.values)

    def is_integral(self) -> bool:
        return all(isinstance(value, int) for value in self.values if value is not None)

    def is_profile(self) -> bool:
        """profile 向量 ⟺ 每个分量都是正整数"""
        return self.is_complete() and all(isinstance(v, int) and v > 0 for v in self.values)

    def total(self) -> Number:
        return normalize(sum(self[e] for e in range(len(self.values))))

    def common_denominator(self) -> int:
        lcm = 1
        for value in self.values:
            if isinstance(value, Fraction):
                lcm = lcm * value.denominator // gcd(lcm, value.denominator)
        return lcm

    def scaled_numerators(self, denominator: int) -> List[Optional[int]]:
        """以 1/denominator 为单位的整数表示, 不能精确表示时报错"""
        result: List[Optional[int]] = []
        for value in self.values:
            if value is None:
                result.append(None)
                continue
            scaled = Fraction(value) * denominator
            if scaled.denominator != 1:
                raise WeightError(f"❌ 权重 {value} 不能用分母 {denominator} 精确表示")
            result.append(scaled.numerator)
        return result

    def to_integers(self) -> Tuple["WeightMap", int]:
        """乘以所有分母的最小公倍数; 返回 (整数权重, 倍数)"""
        factor = self.common_denominator()
        scaled = tuple(
            None if value is None else normalize(value * factor) for value in self.values
        )
        return WeightMap(self.params, scaled), factor

    def as_ints(self) -> List[int]:
        if not (self.is_complete() and self.is_integral()):
            raise WeightError("❌ 权重不是完整的整数向量")
        return [int(value) for value in self.values]

    def with_values(self, updates: Mapping[int, Number]) -> "WeightMap":
        values = list(self.values)
        for e, value in updates.items():
            values[e] = normalize(value)
        return WeightMap(self.params, tuple(values))

    def to_grams(self) -> Dict[str, Number]:
        graph = DeBruijnGraph(self.params)
        return {graph.edge_name(e): v for e, v in enumerate(self.values) if v is not None}


@dataclass(frozen=True)
class Ranking:
    """
    边子集上的排名: order[r] 是排名为 r 的边

    排名总是 0..k-1 的双射; 全排列 (k = q^ℓ) 和部分排列 (信息集上的 π) 共用此类型。
    """

    params: CodeParams
    order: Tuple[int, ...]

    def __post_init__(self):
        if len(set(self.order)) != len(self.order):
            raise RankingError("❌ 排名中同一条边出现了多次")
        for e in self.order:
            if not 0 <= e < self.params.n_edges:
                raise RankingError(f"❌ 边编号越界: {e}")

    @classmethod
    def from_mapping(cls, params: CodeParams, ranks: Mapping[int, int]) -> "Ranking":
        """{边: 排名} -> Ranking, 要求排名恰好是 0..k-1"""
        k = len(ranks)
        order: List[Optional[int]] = [None] * k
        for e, r in ranks.items():
            if not isinstance(r, int) or not 0 <= r < k:
                raise RankingError(f"❌ 排名 {r!r} 不在 0..{k - 1} 范围内")
            if order[r] is not None:
                raise RankingError(f"❌ 排名 {r} 被使用了多次")
            order[r] = e
        return cls(params, tuple(order))  # type: ignore[arg-type]

    @classmethod
    def from_grams(cls, params: CodeParams, ranks: Mapping[str, int]) -> "Ranking":
        graph = DeBruijnGraph(params)
        return cls.from_mapping(params, {graph.edge_id(g): r for g, r in ranks.items()})

    @classmethod
    def from_weights(cls, weights: WeightMap, strict: bool = True) -> "Ranking":
        """
        唯一满足 w ⊨ π 的排名 (只看已赋值的边)

        Args:
            weights: 权重
            strict: True 时权重相同直接报错; False 时按边编号 (即 gram 字典序) 打破平局, 这会丢失信息
        """
        defined = weights.defined_edges()
        if strict:
            values = [weights[e] for e in defined]
            if len(set(values)) != len(values):
                raise RankingError("❌ 权重存在相同值, 无法唯一确定排名")
        order = sorted(defined, key=lambda e: (weights[e], e))
        return cls(weights.params, tuple(order))

    def __len__(self) -> int:
        return len(self.order)

    def __contains__(self, e: object) -> bool:
        return e in self.positions

    @cached_property
    def positions(self) -> Dict[int, int]:
        return {e: r for r, e in enumerate(self.order)}

    @property
    def domain(self) -> frozenset:
        return frozenset(self.order)

    def rank(self, e: int) -> int:
        if e not in self.positions:
            raise RankingError(f"❌ 边 {DeBruijnGraph(self.params).edge_name(e)} 不在排名的定义域中")
        return self.positions[e]

    def is_total(self) -> bool:
        return len(self.order) == self.params.n_edges

    def require_domain(self, expected: Iterable[int], what: str = "信息集"):
        expected_set = frozenset(expected)
        if self.domain != expected_set:
            graph = DeBruijnGraph(self.params)
            missing = sorted(graph.edge_name(e) for e in expected_set - self.domain)
            extra = sorted(graph.edge_name(e) for e in self.domain - expected_set)
            raise RankingError(f"❌ 排名的定义域与{what}不一致: 缺少 {missing}, 多出 {extra}")

    def project(self, subset: Iterable[int]) -> "Ranking":
        """π|_B: 保持 B 内的相对顺序"""
        members = frozenset(subset)
        if not members <= self.domain:
            raise RankingError("❌ 投影集合必须是排名定义域的子集")
        return Ranking(self.params, tuple(e for e in self.order if e in members))

    def to_mapping(self) -> Dict[int, int]:
        return dict(self.positions)

    def to_grams(self) -> Dict[str, int]:
        graph = DeBruijnGraph(self.params)
        return {graph.edge_name(e): r for r, e in enumerate(self.order)}
