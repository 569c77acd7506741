#!/usr/bin/env python3
"""
简单的编码冒烟测试: q=4, ℓ=2 的示例帧与排名, 检查输出 profile 并做往返
"""
import sys
from pathlib import Path

ROOT_DIR = Path(__file__).parent.parent.absolute()
sys.path.insert(0, str(ROOT_DIR))

from src.config import config
from src.core.schemas import FrameDocument, ProfileDocument, RankingDocument
from src.core.sequence import profile_vector, realize_string
from src.core.service import get_service, read_json
from src.engines.systematic_engine import EncodingTrace, SystematicEngine, decode
from loguru import logger

EXPECTED_BALANCED = {"AG": 9, "GT": 9, "TC": 5}


def test_example():
    for path in (config.EXAMPLE_FRAME, config.EXAMPLE_RANKING):
        if not path.exists():
            logger.error(f"❌ Data file not found: {path}")
            return False

    try:
        service = get_service()
        frame_doc = FrameDocument.model_validate(read_json(config.EXAMPLE_FRAME))
        ranking_doc = RankingDocument.model_validate(read_json(config.EXAMPLE_RANKING))
        expected = ProfileDocument.model_validate(read_json(config.EXAMPLE_PROFILE))
        params = ranking_doc.to_params()

        logger.info("🚀 Building frame...")
        frame = service.get_frame(params, frame_doc)

        trace = EncodingTrace()
        x = SystematicEngine(frame).encode(ranking_doc.to_ranking(params), trace)
        balanced = {gram: trace.balanced.to_grams()[gram] for gram in EXPECTED_BALANCED}
        if balanced != EXPECTED_BALANCED:
            logger.error(f"❌ Balanced stage mismatch: {balanced}")
            return False
        if x != expected.to_weights(params):
            logger.error(f"❌ Profile mismatch: {x.to_grams()}")
            return False
        logger.info(f"✅ Profile matches, total length {x.total()}")

        s = realize_string(x)
        if profile_vector(s, params.ell, params) != x:
            logger.error("❌ Realized string does not reproduce the profile")
            return False
        if decode(frame, x).ranking != ranking_doc.to_ranking(params):
            logger.error("❌ Decoded ranking differs from input")
            return False

        output_file = config.OUTPUT_DIR / "example.txt"
        output_file.parent.mkdir(parents=True, exist_ok=True)
        output_file.write_text(s + "\n", encoding="utf-8")
        logger.info(f"✅ Success! String saved to: {output_file}")
        return True

    except Exception as e:
        logger.error(f"❌ Test failed: {e}")
        import traceback
        traceback.print_exc()
        return False


if __name__ == "__main__":
    success = test_example()
    sys.exit(0 if success else 1)
