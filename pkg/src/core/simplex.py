"""
精确有理数单纯形 (第一阶段)

只回答 "A·y = b, y ≥ 0 是否有解", 有解时给出一个基本可行解。
全部运算使用 Fraction, 入基/出基使用 Bland 规则, 保证终止且结果可复现。
"""
from fractions import Fraction
from typing import List, Optional, Sequence

from .errors import InvariantViolation


class ExactSimplex:
    """
    第一阶段单纯形: 为每一行添加人工变量, 最小化人工变量之和

    表格布局: 每行 = [原变量 (n 列) | 人工变量 (m 列) | 右端项]
    """

    def __init__(self, rows: Sequence[Sequence[int]], rhs: Sequence[int]):
        """
        Args:
            rows: 约束矩阵 A (m × n, 整数或有理数)
            rhs: 右端项 b (长度 m)
        """
        if len(rows) != len(rhs):
            raise ValueError(f"❌ 约束行数 {len(rows)} 与右端项长度 {len(rhs)} 不一致")
        self.m = len(rows)
        self.n = len(rows[0]) if rows else 0
        self.pivots = 0

        width = self.n + self.m
        self.table: List[List[Fraction]] = []
        for i, (row, b) in enumerate(zip(rows, rhs)):
            if len(row) != self.n:
                raise ValueError(f"❌ 第 {i} 行长度 {len(row)} 应为 {self.n}")
            sign = -1 if b < 0 else 1
            line = [Fraction(sign * a) for a in row] + [Fraction(0)] * self.m + [Fraction(sign * b)]
            line[self.n + i] = Fraction(1)
            self.table.append(line)
        self.basis = list(range(self.n, width))

        # 约化成本: c_j - Σ_i a_ij (人工变量成本为 1)
        self.cost = [Fraction(0)] * (width + 1)
        for j in range(self.n):
            self.cost[j] = -sum(line[j] for line in self.table)
        self.cost[width] = -sum(line[width] for line in self.table)

    def _pivot(self, row: int, col: int):
        line = self.table[row]
        pivot = line[col]
        if pivot != 1:
            self.table[row] = line = [value / pivot for value in line]
        for i, other in enumerate(self.table):
            factor = other[col]
            if i != row and factor:
                self.table[i] = [a - factor * b for a, b in zip(other, line)]
        factor = self.cost[col]
        if factor:
            self.cost = [a - factor * b for a, b in zip(self.cost, line)]
        self.basis[row] = col
        self.pivots += 1

    def _entering(self) -> Optional[int]:
        for j in range(self.n + self.m):
            if self.cost[j] < 0:
                return j
        return None

    def _leaving(self, col: int) -> Optional[int]:
        best = None
        best_key = None
        for i, line in enumerate(self.table):
            if line[col] > 0:
                key = (line[-1] / line[col], self.basis[i])
                if best_key is None or key < best_key:
                    best, best_key = i, key
        return best

    def solve(self) -> Optional[List[Fraction]]:
        """
        Returns:
            可行解 y (长度 n), 不可行时返回 None
        """
        while True:
            col = self._entering()
            if col is None:
                break
            row = self._leaving(col)
            if row is None:
                # 第一阶段目标有下界 0, 不可能无界
                raise InvariantViolation("❌ 第一阶段单纯形出现无界方向")
            self._pivot(row, col)

        residual = -self.cost[-1]
        if residual > 0:
            return None

        solution = [Fraction(0)] * self.n
        for i, var in enumerate(self.basis):
            if var < self.n:
                solution[var] = self.table[i][-1]
        return solution
