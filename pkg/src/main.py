"""
DNA 秩调制编码 命令行入口

用法: python -m src.main <子命令> [参数]
退出码: 0 成功; 1 输入/领域错误; 2 内部不变量被破坏。错误以 JSON 写到 stderr。
"""
import argparse
import sys
from pathlib import Path
from typing import List, Optional, Union

from loguru import logger
from pydantic import ValidationError
from rich.console import Console
from rich.progress import Progress
from rich.table import Table

from src import __version__
from src.config import config
from src.core.errors import InvariantViolation, RankModError
from src.core.feasibility import ALL_SUBSETS, SINGLETONS
from src.core.graph import CodeParams
from src.core.schemas import (
    DyckReportDocument,
    ErrorBody,
    ErrorDocument,
    FrameDocument,
    ProfileDocument,
    RankingDocument,
    SizesDocument,
)
from src.core.sequence import to_fasta
from src.core.service import get_service, read_json
from src.engines.systematic_engine import MODES, SYSTEMATIC

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_INVARIANT = 2


def setup_logging(verbose: int):
    level = config.LOG_LEVEL
    if verbose == 1:
        level = "INFO"
    elif verbose >= 2:
        level = "DEBUG"
    logger.remove()
    logger.add(sys.stderr, format="<level>{message}</level>", level=level)


def _write(text: str, output: Optional[Path]):
    if output is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
    logger.info(f"💾 已写出: {output}")


def _load_frame(path: Optional[Path]) -> Optional[FrameDocument]:
    return FrameDocument.model_validate(read_json(path)) if path else None


def _load_ranking_or_profile(path: Path) -> Union[RankingDocument, ProfileDocument]:
    data = read_json(path)
    if "counts" in data:
        return ProfileDocument.model_validate(data)
    return RankingDocument.model_validate(data)


def _params(args) -> CodeParams:
    return CodeParams.create(args.q, args.l, list(args.alphabet) if args.alphabet else None)


def _progress(console: Console, description: str):
    """rich 进度条, 作为 on_chunk 回调使用"""
    progress = Progress(console=console, transient=True)
    task = progress.add_task(description, total=None)

    def on_chunk(done: int, total: int):
        progress.update(task, completed=done, total=total)

    return progress, on_chunk


# --- 子命令 ---


def cmd_encode(args) -> int:
    doc = RankingDocument.model_validate(read_json(args.input))
    profile = get_service().encode(doc, args.mode, _load_frame(args.frame), args.reduced_delta)
    _write(profile.dumps(), args.output)
    return EXIT_OK


def cmd_decode(args) -> int:
    doc = ProfileDocument.model_validate(read_json(args.input))
    ranking = get_service().decode(doc, args.mode, _load_frame(args.frame), args.reduced_delta, args.split_loops)
    _write(ranking.dumps(), args.output)
    return EXIT_OK


def cmd_realize(args) -> int:
    doc = ProfileDocument.model_validate(read_json(args.input))
    s = get_service().realize(doc)
    _write(to_fasta(s, args.header) if args.fasta else s, args.output)
    return EXIT_OK


def cmd_profile(args) -> int:
    if args.string is not None:
        s = args.string
    else:
        s = "".join(Path(args.input).read_text(encoding="utf-8").split())
    doc = get_service().profile(s, args.l, args.alphabet)
    _write(doc.dumps(), args.output)
    return EXIT_OK


def cmd_feasible(args) -> int:
    doc = _load_ranking_or_profile(args.input)
    _write(get_service().feasible(doc).dumps(), args.output)
    return EXIT_OK


def _dyck_table(report: DyckReportDocument) -> Table:
    table = Table(title=f"Dyck 构型检查 q={report.q}, ℓ={report.ell} ({report.mode})")
    table.add_column("顶点集合")
    table.add_column("指示串")
    table.add_column("Dyck", justify="center")
    for cut in report.cuts:
        table.add_row(",".join(cut.vertices), cut.word, "✗" if cut.dyck else "")
    return table


def cmd_check_dyck(args) -> int:
    doc = _load_ranking_or_profile(args.input)
    report = get_service().check_dyck(doc, args.mode)
    if args.table:
        Console().print(_dyck_table(report))
    else:
        _write(report.dumps(), args.output)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    params = _params(args)
    service = get_service()
    output = None if args.count_only else args.output
    progress, on_chunk = _progress(Console(stderr=True), "穷举排列")
    with progress:
        if args.all_nodes:
            doc = service.sweep(params, args.parallel, args.force, on_chunk)
        else:
            doc = service.enumerate(params, args.parallel, not args.no_prefilter, args.force, output, on_chunk)
    _write(doc.dumps(), None)
    return EXIT_OK


def _sizes_table(doc: SizesDocument) -> Table:
    table = Table(title=f"码本大小与码率 q={doc.q}, ℓ={doc.ell} (N={doc.info_length}, C_q={doc.catalan})")
    table.add_column("构造")
    table.add_column("码本大小", justify="right")
    table.add_column("码率", justify="right")
    rows = [
        ("systematic", doc.systematic),
        ("selfloop_M", doc.selfloop_M),
        ("firstnode", doc.firstnode),
        ("prior_work", doc.prior_work),
        ("allnodes_reference", doc.allnodes_reference),
        ("total_feasible_reference", doc.total_feasible_reference),
    ]
    for name, size in rows:
        if size is not None:
            table.add_row(name, str(size), doc.rates.get(name, ""))
    if doc.reference_note:
        table.caption = f"*_reference: {doc.reference_note}"
    return table


def cmd_sizes(args) -> int:
    doc = get_service().sizes(_params(args), args.reduced_delta)
    if args.table:
        Console().print(_sizes_table(doc))
        bounds = Table(title="长度界")
        bounds.add_column("界")
        bounds.add_column("值", justify="right")
        for name, value in doc.bounds.items():
            bounds.add_row(name, value)
        Console().print(bounds)
    else:
        _write(doc.dumps(), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    frame_doc = _load_frame(args.frame)
    ranking_doc = RankingDocument.model_validate(read_json(args.input)) if args.input else None
    expected = ProfileDocument.model_validate(read_json(args.expected)) if args.expected else None
    if ranking_doc is not None:
        params = ranking_doc.to_params()
    elif frame_doc is not None:
        params = frame_doc.to_params()
    else:
        params = _params(args)
    report = get_service().verify(
        params,
        frame_doc=frame_doc,
        ranking_doc=ranking_doc,
        expected=expected,
        mode=args.mode,
        samples=args.samples,
        seed=args.seed,
        reduced=args.reduced_delta,
    )
    _write(report.dumps(), args.output)
    return EXIT_OK if report.ok else EXIT_DOMAIN


# --- 参数 ---


def _add_params(parser: argparse.ArgumentParser):
    parser.add_argument("--q", type=int, default=config.DEFAULT_Q, help="字母表大小")
    parser.add_argument("--l", type=int, default=config.DEFAULT_L, help="gram 长度 ℓ")
    parser.add_argument("--alphabet", default=None, help="字母表 (缺省: q≤4 为 ACGT 前缀, 否则 A..Z)")


def _add_output(parser: argparse.ArgumentParser):
    parser.add_argument("--output", type=Path, default=None, help="输出文件 (缺省: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankmod",
        description="ℓ-gram profile 向量上的秩调制编码 (DNA 存储)",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
示例:
  python -m src.main encode --input data/example_ranking.json --frame data/example_frame.json
  python -m src.main enumerate --q 3 --l 2 --count-only
  python -m src.main sizes --q 4 --l 2 --table
        """,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({config.FRAME_ALGORITHM})")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v: INFO, -vv: DEBUG")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="排名 JSON -> profile JSON")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--frame", type=Path, default=None)
    p.add_argument("--mode", choices=MODES, default=SYSTEMATIC)
    p.add_argument("--reduced-delta", action="store_true", help="ℓ=2 缩减 Δ 模式")
    _add_output(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="profile JSON -> 信息集排名 JSON")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--frame", type=Path, default=None)
    p.add_argument("--mode", choices=MODES, default=None, help="缺省取文档中记录的模式")
    p.add_argument("--reduced-delta", action="store_true")
    p.add_argument("--split-loops", action="store_true", help="firstnode: 自环单独给出绝对排名")
    _add_output(p)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("realize", help="profile JSON -> 字符串")
    p.add_argument("--input", "--profile", dest="input", type=Path, required=True)
    p.add_argument("--fasta", action="store_true", help="FASTA 输出 (仅 ACGT)")
    p.add_argument("--header", default="rankmod")
    _add_output(p)
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("profile", help="字符串 -> profile JSON")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--string")
    source.add_argument("--input", type=Path, help="文本文件 (忽略空白)")
    p.add_argument("--l", type=int, default=config.DEFAULT_L)
    p.add_argument("--alphabet", default=None)
    _add_output(p)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("feasible", help="排名可行性判定 (附见证)")
    p.add_argument("--input", type=Path, required=True, help="排名 JSON 或 profile JSON")
    _add_output(p)
    p.set_defaults(func=cmd_feasible)

    p = sub.add_parser("check-dyck", help="Dyck 构型检查")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--mode", choices=(SINGLETONS, ALL_SUBSETS), default=SINGLETONS)
    p.add_argument("--table", action="store_true")
    _add_output(p)
    p.set_defaults(func=cmd_check_dyck)

    p = sub.add_parser("enumerate", help="穷举统计可行排列")
    _add_params(p)
    p.add_argument("--count-only", action="store_true")
    p.add_argument("--parallel", type=int, default=None, help=f"工作进程数 (缺省 {config.PARALLEL_WORKERS})")
    p.add_argument("--no-prefilter", action="store_true", help="关闭单点 Dyck 预筛")
    p.add_argument("--all-nodes", action="store_true", help="改为统计满足全顶点充分条件的排列")
    p.add_argument("--force", action="store_true", help="忽略资源上限")
    p.add_argument("--output", type=Path, default=None, help="可行排列 JSON Lines 输出")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("sizes", help="码本大小 / 码率 / 长度界")
    _add_params(p)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", default=True)
    fmt.add_argument("--table", action="store_true")
    p.add_argument("--reduced-delta", action="store_true")
    _add_output(p)
    p.set_defaults(func=cmd_sizes)

    p = sub.add_parser("verify", help="编码 -> 实现 -> 计数 -> 解码 往返自检")
    _add_params(p)
    p.add_argument("--frame", type=Path, default=None)
    p.add_argument("--input", type=Path, default=None, help="排名 JSON (缺省: 随机样本)")
    p.add_argument("--expected", type=Path, default=None, help="期望的 profile JSON")
    p.add_argument("--mode", choices=MODES, default=SYSTEMATIC)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reduced-delta", action="store_true")
    _add_output(p)
    p.set_defaults(func=cmd_verify)
    return parser


def _fail(code: str, message: str, exit_code: int) -> int:
    doc = ErrorDocument(error=ErrorBody(code=code, message=message))
    sys.stderr.write(doc.dumps() + "\n")
    return exit_code


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)
    try:
        return args.func(args)
    except InvariantViolation as e:
        logger.error(f"❌ 内部不变量被破坏: {e}")
        return _fail(e.code, str(e), EXIT_INVARIANT)
    except RankModError as e:
        return _fail(e.code, str(e), EXIT_DOMAIN)
    except ValidationError as e:
        return _fail("invalid_document", str(e), EXIT_DOMAIN)


if __name__ == "__main__":
    sys.exit(main())
