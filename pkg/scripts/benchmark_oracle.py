#!/usr/bin/env python3
"""
可行性判定 / 编码器 / 字符串实现 性能测试脚本

测试维度:
  • LP 可行性判定 (随机全排列)
  • 系统码 / 首顶点 / 全顶点编码
  • 字符串实现与重新计数
"""
import random
import sys
import time
from pathlib import Path

ROOT_DIR = Path(__file__).parent.parent.absolute()
sys.path.insert(0, str(ROOT_DIR))

from loguru import logger

from src.core.errors import DyckConfigurationError
from src.core.feasibility import is_feasible_ranking
from src.core.graph import CodeParams, Ranking
from src.core.sequence import profile_vector, realize_string
from src.core.service import get_service
from src.engines.nonsystematic_engine import NonSystematicEngine, encode_full
from src.engines.systematic_engine import FIRSTNODE, SYSTEMATIC, SystematicEngine


def _timed(fn, samples):
    """对每个样本调用 fn, 返回 (总耗时, 成功次数)"""
    ok = 0
    start = time.time()
    for sample in samples:
        if fn(sample):
            ok += 1
    return time.time() - start, ok


def benchmark_params(q: int, ell: int, count: int, seed: int):
    """
    测试一组参数

    Args:
        q: 字母表大小
        ell: gram 长度
        count: 样本数
        seed: 随机种子
    """
    params = CodeParams.create(q, ell)
    rng = random.Random(seed)
    service = get_service()

    start = time.time()
    frame = service.get_frame(params)
    frame_time = time.time() - start

    results = {"params": f"q={q}, ℓ={ell}", "frame_time": frame_time, "rows": []}

    total_rankings = []
    for _ in range(count):
        order = list(range(params.n_edges))
        rng.shuffle(order)
        total_rankings.append(Ranking(params, tuple(order)))

    elapsed, ok = _timed(lambda pi: is_feasible_ranking(params, pi) is not None, total_rankings)
    results["rows"].append(("feasibility (LP)", count, elapsed, ok))

    elapsed, ok = _timed(lambda pi: encode_full(params, pi) is not None, total_rankings)
    results["rows"].append(("encode_full", count, elapsed, ok))

    systematic = [service.random_ranking(frame, SYSTEMATIC, rng)[0] for _ in range(count)]
    profiles = []

    def run_systematic(pi):
        profiles.append(SystematicEngine(frame).encode(pi))
        return True

    elapsed, ok = _timed(run_systematic, systematic)
    results["rows"].append(("encode_systematic", count, elapsed, ok))

    def run_first_node(pi):
        try:
            NonSystematicEngine(frame).encode_first_node(pi)
            return True
        except DyckConfigurationError:
            return False

    first_node = [service.random_ranking(frame, FIRSTNODE, rng)[0] for _ in range(count)]
    elapsed, ok = _timed(run_first_node, first_node)
    results["rows"].append(("encode_first_node", count, elapsed, ok))

    elapsed, ok = _timed(lambda x: profile_vector(realize_string(x), ell, params) == x, profiles)
    results["rows"].append(("realize + profile", count, elapsed, ok))
    return results


def print_comparison(results_list):
    """打印对比结果"""
    print("\n" + "=" * 80)
    print("📊 性能测试结果")
    print("=" * 80)

    if not results_list:
        print("❌ 没有可用的测试结果")
        return

    print("\n🔄 编码帧构建时间:")
    for res in results_list:
        print(f"   {res['params']:<20} {res['frame_time']:.4f}s")

    print("\n⏱️  各操作耗时:")
    header = f"   {'参数':<16} {'操作':<20} {'样本':<6} {'总耗时(s)':<10} {'单次(ms)':<10} {'成功':<6}"
    print(header)
    print("   " + "-" * len(header))
    for res in results_list:
        for name, count, elapsed, ok in res["rows"]:
            per_call = elapsed / count * 1000 if count else 0
            print(f"   {res['params']:<16} {name:<20} {count:<6} {elapsed:<10.3f} {per_call:<10.2f} {ok:<6}")

    print("\n📝 测试完成!")
    print("=" * 80)


def main():
    """主函数"""
    logger.remove()
    logger.add(sys.stderr, format="<level>{message}</level>", level="WARNING")

    import argparse
    parser = argparse.ArgumentParser(
        description="可行性判定与编码器性能测试",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
示例:
  # 默认: q=3,4 且 ℓ=2
  python scripts/benchmark_oracle.py

  # 更多样本
  python scripts/benchmark_oracle.py --samples 1000 --q 4 --l 2 3
        """,
    )
    parser.add_argument("--q", type=int, nargs="+", default=[3, 4], help="字母表大小")
    parser.add_argument("--l", type=int, nargs="+", default=[2], help="gram 长度")
    parser.add_argument("--samples", type=int, default=100, help="每项操作的样本数")
    parser.add_argument("--seed", type=int, default=0, help="随机种子")
    args = parser.parse_args()

    print("🚀 可行性判定与编码器性能测试")
    results_list = []
    for q in args.q:
        for ell in args.l:
            print(f"\n--- q={q}, ℓ={ell} ---")
            results_list.append(benchmark_params(q, ell, args.samples, args.seed))

    print_comparison(results_list)


if __name__ == "__main__":
    try:
        main()
    except Exception as e:
        logger.error(f"❌ 测试失败: {e}")
        import traceback
        traceback.print_exc()
        sys.exit(1)
