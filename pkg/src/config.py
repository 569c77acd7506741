"""
DNA 秩调制编码 配置
"""
import os
from pathlib import Path

from dotenv import load_dotenv

ROOT_DIR = Path(__file__).parent.parent.absolute()

load_dotenv(ROOT_DIR / ".env")


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    if value is None or not value.strip():
        return default
    try:
        return int(value)
    except ValueError:
        raise ValueError(f"❌ 环境变量 {name} 必须是整数, 当前值: {value!r}")


class Config:
    # 数据路径
    DATA_DIR = ROOT_DIR / "data"
    EXAMPLE_FRAME = DATA_DIR / "example_frame.json"
    EXAMPLE_RANKING = DATA_DIR / "example_ranking.json"
    EXAMPLE_PROFILE = DATA_DIR / "example_profile.json"

    # 输出目录 (不在导入时创建)
    OUTPUT_DIR = ROOT_DIR / "output"

    # 默认码参数
    DEFAULT_Q = _env_int("RANKMOD_DEFAULT_Q", 4)
    DEFAULT_L = _env_int("RANKMOD_DEFAULT_L", 2)

    # 资源保护: 全排列枚举允许的最大 q^ℓ, 以及 all_subsets 模式的最大顶点数
    ENUMERATION_LIMIT = _env_int("RANKMOD_ENUM_LIMIT", 9)
    DYCK_SUBSET_LIMIT = _env_int("RANKMOD_DYCK_SUBSET_LIMIT", 12)

    # 并行 & 显示
    PARALLEL_WORKERS = _env_int("RANKMOD_WORKERS", 1)
    RATE_DIGITS = _env_int("RANKMOD_RATE_DIGITS", 3)
    LOG_LEVEL = os.getenv("RANKMOD_LOG_LEVEL", "WARNING").upper()

    # 帧生成算法标识 (--version 输出, 用于跨版本比较结果)
    FRAME_ALGORITHM = "fkm-lyndon+loop-free-start+hierholzer-min-id+first-occurrence/2"


config = Config()
