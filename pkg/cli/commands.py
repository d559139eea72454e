"""
命令行模块
construct / verify / bounds / replay 四类子命令，只负责参数解析、文件读写和结果输出
"""
import argparse
import contextlib
import io
import sys
import time
from typing import Callable, Dict, List, Optional, Sequence

from cli.report import format_spectrum, format_table, render
from core import __version__
from core.bounds import bound_grid, bound_report, rows_to_csv, CSV_COLUMNS
from core.errors import OvoidError, ParameterError
from core.geometry import (
    SymplecticSpace, build_cap, cap_profile_expected, hyperplane_profile, parse_family,
    polar_params, verify_cap,
)
from core.gf2linalg import IntMatrix, lempel_factor, rank_exact, rank_f2, rank_modp, walsh_spectrum
from core.graphs import (
    bch_cayley, cayley_f2n, complementary_rank_f2, is_triangle_free, rank_a_minus_i_real,
    strong_power,
)
from core.ovoids import (
    BchReport, VectorFamily, VerificationMethod, amplify_bls, bch_rank_bound,
    construct_2ovoid_bch, embed_to_symplectic, nearly_orthogonal_verify, oddtown_verify,
    run_sampler, verify_partial_m_ovoid,
)
from utils.config import config
from utils.formats import (
    dump_json, format_binary_vectors, format_bitmatrix, format_graph, format_points,
    parse_binary_family, parse_bitmatrix, parse_graph, parse_intmatrix, parse_points, read_text,
    write_text,
)
from utils.logger import get_logger, setup_logging
from utils.manifest import RunManifest, replay

logger = get_logger("cli")

EXIT_OK = 0
EXIT_UNVERIFIED = 1
EXIT_ERROR = 2

# 实秩精确计算的最大维数，更大时给出 mod p 下界
EXACT_RANK_MAX_N = 6


class CommandContext:
    """一次命令运行的共享状态：解析后的参数、运行清单与输出"""

    def __init__(self, args: argparse.Namespace, argv: Sequence[str]):
        self.args = args
        self.as_json = args.json if args.json is not None else config.get_output_format() == "json"
        self.manifest = RunManifest(argv=list(argv), version=__version__)
        self._start = time.perf_counter()

    def read_input(self, path: str) -> str:
        text = read_text(path)
        self.manifest.add_input(path)
        return text

    def write_output(self, path: str, text: str) -> None:
        write_text(path, text)
        self.manifest.add_output(path)
        logger.info("已写入 %s", path)

    def record_seed(self, seed: int) -> None:
        self.manifest.seeds.append(int(seed))

    def emit(self, text: str) -> None:
        print(text, end="")

    def finish(self) -> None:
        """有输出文件时在第一个输出旁写清单"""
        if self.manifest.outputs:
            self.manifest.wall_time = round(time.perf_counter() - self._start, 6)
            self.manifest.write()


def parse_int_list(text: str) -> List[int]:
    """解析 "3..6" 或 "2,3,5" 形式的整数列表"""
    try:
        if ".." in text:
            low, high = text.split("..", 1)
            values = list(range(int(low), int(high) + 1))
        else:
            values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ParameterError(f"无法解析整数列表: {text!r}") from None
    if not values:
        raise ParameterError(f"整数列表为空: {text!r}")
    return values


# ---------------------------------------------------------------- construct

def cmd_construct_cap(ctx: CommandContext) -> int:
    args = ctx.args
    n = args.n
    points = build_cap(n)
    graph = cayley_f2n(n, points)
    spectrum = walsh_spectrum(n, points)
    profile = hyperplane_profile(points, n)
    if n <= EXACT_RANK_MAX_N:
        real_rank, rank_method = rank_a_minus_i_real(graph), "exact"
    else:
        real_rank, rank_method = rank_modp(graph.adjacency_intmatrix(shift=-1)), "modp-lower-bound"

    document: Dict[str, object] = {
        "n": n,
        "cap_size": len(points),
        "vertices": graph.n,
        "edges": graph.edge_count(),
        "degree": graph.degree(0),
        "regular": graph.is_regular(),
        "triangle_free": is_triangle_free(graph),
        "spectrum": {str(k): v for k, v in sorted(spectrum.items(), reverse=True)},
        "rank_f2_a_plus_i": complementary_rank_f2(graph),
        "rank_real_a_minus_i": real_rank,
        "rank_method": rank_method,
        "hyperplane_profile": {str(k): v for k, v in profile.tallies.items()},
        "profile_checksum_ok": profile.checksum_ok,
        "profile_matches_expected": profile.tallies == cap_profile_expected(n),
    }
    if args.emit_graph:
        ctx.write_output(args.emit_graph, format_graph(graph))
    if args.emit_points:
        ctx.write_output(args.emit_points, format_binary_vectors(points, n))

    rows = [(size, count) for size, count in profile.tallies.items()]
    view = dict(document, spectrum=format_spectrum(spectrum))
    ctx.emit(render(view if not ctx.as_json else document, ctx.as_json, f"帽图 n={n}",
                    rows, ("截面大小", "超平面个数")))
    return EXIT_OK


def cmd_construct_bch(ctx: CommandContext) -> int:
    args = ctx.args
    family = construct_2ovoid_bch(args.h)
    verdict = nearly_orthogonal_verify(family, 2) if args.check else None
    report = BchReport(args.h, len(family), family.dimension, bch_rank_bound(args.h), verdict)
    if args.emit_vectors:
        ctx.write_output(args.emit_vectors, format_binary_vectors(family.vectors, family.dimension))
    if args.emit_graph:
        ctx.write_output(args.emit_graph, format_graph(bch_cayley(args.h)))
    ctx.emit(render(report.to_dict(), ctx.as_json, f"BCH 构造 h={args.h}"))
    if verdict is False:
        return EXIT_UNVERIFIED
    return EXIT_OK


def cmd_construct_strong_power(ctx: CommandContext) -> int:
    args = ctx.args
    base = parse_graph(ctx.read_input(args.graph), path=args.graph)
    power = strong_power(base, args.power)
    base_rank = complementary_rank_f2(base)
    document: Dict[str, object] = {
        "base_vertices": base.n,
        "base_edges": base.edge_count(),
        "power": args.power,
        "vertices": power.n,
        "edges": power.edge_count(),
        "base_rank_f2": base_rank,
        "rank_bound": base_rank ** args.power,
    }
    if args.rank:
        document["rank_f2"] = complementary_rank_f2(power)
    if args.emit_graph:
        ctx.write_output(args.emit_graph, format_graph(power))
    ctx.emit(render(document, ctx.as_json, f"强幂 k={args.power}"))
    return EXIT_OK


def cmd_construct_amplify(ctx: CommandContext) -> int:
    args = ctx.args
    base = parse_graph(ctx.read_input(args.graph), path=args.graph)
    seed = config.get_seed() if args.seed is None else args.seed
    ctx.record_seed(seed)
    result = amplify_bls(base, args.m, args.power, seed)
    if args.emit_graph:
        ctx.write_output(args.emit_graph, format_graph(result.graph))
    ctx.emit(render(result.to_dict(), ctx.as_json, f"强积放大 m={args.m} h={args.power}"))
    return EXIT_OK if result.clique_number <= args.m else EXIT_UNVERIFIED


def cmd_construct_sample(ctx: CommandContext) -> int:
    args = ctx.args
    params = polar_params(parse_family(args.family), args.r, args.q)
    seed = config.get_seed() if args.seed is None else args.seed
    ctx.record_seed(seed)
    run = run_sampler(params, args.m, rho=args.rho, trials=args.trials, seed=seed)
    certificate = run.certificate
    if args.output:
        ctx.write_output(args.output, dump_json(certificate.to_dict()))
    if args.emit_points:
        ctx.write_output(args.emit_points, format_points(SymplecticSpace(args.r, args.q), certificate.points))

    document = {
        "space": certificate.space.label,
        "m": certificate.m,
        "rho": run.rho,
        "trials": len(run.trials),
        "target_size": run.target_size,
        "best_size": certificate.size,
        "unpruned_successes": run.unpruned_successes,
        "size_hits": run.size_hits,
        "joint_hits": run.joint_hits,
        "verified": certificate.verified,
        "seed": seed,
    }
    rows = [(t.trial, t.sample_size, t.unpruned_verified, t.pruned_size, t.deletions) for t in run.trials]
    if ctx.as_json:
        document["certificate"] = certificate.to_dict()
        ctx.emit(dump_json(document))
    else:
        ctx.emit(render(document, False, f"随机构造 {certificate.space.label}",
                        rows, ("试验", "抽样规模", "未修剪即合格", "修剪后规模", "删除数")))
    return EXIT_OK if certificate.verified else EXIT_UNVERIFIED


# ---------------------------------------------------------------- verify

def _emit_certificate(ctx: CommandContext, document: Dict[str, object], title: str) -> None:
    if ctx.args.output:
        ctx.write_output(ctx.args.output, dump_json(document))
    if ctx.as_json:
        ctx.emit(dump_json(document))
        return
    view = dict(document)
    if isinstance(view.get("space"), dict):
        view["space"] = view["space"]["label"]
    counters = view.get("counters") or {}
    ctx.emit(render(view, False, title, sorted(counters.items()), ("计数器", "值")))


def cmd_verify_movoid(ctx: CommandContext) -> int:
    args = ctx.args
    space = SymplecticSpace(args.r, args.q)
    points = parse_points(ctx.read_input(args.points), space, path=args.points)
    method = VerificationMethod(args.method) if args.method else None
    certificate = verify_partial_m_ovoid(space, points, args.m, method=method, cross_check=args.cross_check)
    _emit_certificate(ctx, certificate.to_dict(), f"部分 {args.m}-卵形体验证 {certificate.space.label}")
    return EXIT_OK if certificate.verified else EXIT_UNVERIFIED


def cmd_verify_nearly_orthogonal(ctx: CommandContext) -> int:
    args = ctx.args
    dimension, values = parse_binary_family(ctx.read_input(args.vectors), path=args.vectors)
    family = VectorFamily(dimension, tuple(values))
    verified = nearly_orthogonal_verify(family, args.m)
    document: Dict[str, object] = {
        "kind": "nearly-orthogonal",
        "dimension": dimension,
        "size": len(family),
        "m": args.m,
        "has_repeats": family.has_repeats(),
        "verified": verified,
    }
    if args.embed:
        certificate = embed_to_symplectic(family, args.m)
        document["embedding"] = certificate.to_dict()
        document["embedding_agrees"] = certificate.verified == verified
    _emit_certificate(ctx, document, f"{args.m}-近正交验证")
    return EXIT_OK if verified else EXIT_UNVERIFIED


def cmd_verify_oddtown(ctx: CommandContext) -> int:
    args = ctx.args
    t, sets = parse_binary_family(ctx.read_input(args.sets), path=args.sets)
    verified = oddtown_verify(sets, args.m, t)
    document = {"kind": "oddtown", "t": t, "size": len(sets), "m": args.m, "verified": verified}
    _emit_certificate(ctx, document, f"广义 Oddtown 验证 m={args.m}")
    return EXIT_OK if verified else EXIT_UNVERIFIED


def cmd_verify_cap(ctx: CommandContext) -> int:
    args = ctx.args
    dimension, points = parse_binary_family(ctx.read_input(args.points), path=args.points)
    if dimension != args.n:
        raise ParameterError(f"点的长度 {dimension} 与 --n {args.n} 不一致")
    verified = verify_cap(points)
    profile = hyperplane_profile(points, args.n)
    document = {
        "kind": "cap",
        "n": args.n,
        "size": profile.size,
        "verified": verified,
        "hyperplane_profile": {str(k): v for k, v in profile.tallies.items()},
        "profile_checksum_ok": profile.checksum_ok,
    }
    _emit_certificate(ctx, document, f"帽验证 n={args.n}")
    return EXIT_OK if verified else EXIT_UNVERIFIED


def cmd_verify_rank(ctx: CommandContext) -> int:
    args = ctx.args
    text = ctx.read_input(args.matrix)
    document: Dict[str, object] = {"kind": "rank"}
    if args.integer:
        matrix = parse_intmatrix(text, path=args.matrix)
        rank = rank_exact(matrix)
        document.update(rows=matrix.rows, cols=matrix.cols, rank_exact=rank, rank_modp=rank_modp(matrix))
        verified = True
    else:
        matrix = parse_bitmatrix(text, path=args.matrix)
        rank = rank_f2(matrix)
        exact = rank_exact(IntMatrix.from_bitmatrix(matrix))
        document.update(rows=matrix.rows, cols=matrix.cols, rank_f2=rank, rank_exact=exact)
        verified = rank <= exact
        if matrix.is_symmetric() and matrix.diagonal().any():
            factor = lempel_factor(matrix)
            factor_ok = factor.cols == rank and factor @ factor.transpose() == matrix
            document["lempel_columns"] = factor.cols
            document["lempel_ok"] = factor_ok
            verified = verified and factor_ok
            if args.emit_factor:
                ctx.write_output(args.emit_factor, format_bitmatrix(factor))
        elif args.emit_factor:
            raise ParameterError("只有对角线非零的对称矩阵才有 Lempel 分解")
    if args.expect_rank is not None:
        document["expected_rank"] = args.expect_rank
        verified = verified and rank == args.expect_rank
    document["verified"] = verified
    _emit_certificate(ctx, document, f"矩阵秩 {args.matrix}")
    return EXIT_OK if verified else EXIT_UNVERIFIED


# ---------------------------------------------------------------- bounds

def cmd_bounds(ctx: CommandContext) -> int:
    args = ctx.args
    if args.grid:
        families = args.families.split(",") if args.families else [args.family]
        ranks = parse_int_list(args.ranks) if args.ranks else [args.r]
        orders = parse_int_list(args.orders) if args.orders else [args.q]
        rows = bound_grid(families, ranks, orders, args.m)
        if args.output:
            ctx.write_output(args.output, rows_to_csv(rows))
        if ctx.as_json:
            ctx.emit(dump_json({"rows": [dict(zip(CSV_COLUMNS, row)) for row in rows]}))
        else:
            ctx.emit(format_table(CSV_COLUMNS, rows))
        return EXIT_OK

    if args.r is None or args.q is None:
        raise ParameterError("单个空间需要 --r 与 --q（或使用 --grid）")
    report = bound_report(polar_params(parse_family(args.family), args.r, args.q), args.m)
    if args.output:
        ctx.write_output(args.output, rows_to_csv(report.rows()))
    if ctx.as_json:
        ctx.emit(dump_json(report.to_dict()))
        return EXIT_OK
    summary = {
        "space": report.space.label,
        "m": report.m,
        "movoid_size": report.movoid_size,
        "verdict": report.verdict.describe() if report.verdict else "n/a",
        "thresholds": ", ".join(f"{k}: r≥{v}" for k, v in report.thresholds.items() if v is not None),
    }
    rows = [(e.name, e.value, e.tag, e.group, "*" if e.is_minimum else "") for e in report.entries]
    ctx.emit(render(summary, False, f"{report.space.label} m={report.m} 的界", rows,
                    ("界", "值", "出处", "类别", "最小")))
    return EXIT_OK


# ---------------------------------------------------------------- replay

def cmd_replay(ctx: CommandContext) -> int:
    # 被重放命令的标准输出不混入重放报告
    with contextlib.redirect_stdout(io.StringIO()):
        result = replay(ctx.args.manifest, main)
    rows = [(name, "一致") for name in result.matched] + [(name, "不一致") for name in result.mismatched]
    rows += [(name, "输入缺失或已改变") for name in result.missing_inputs]
    document = {"manifest": ctx.args.manifest, "exit_code": result.exit_code, "ok": result.ok}
    ctx.emit(render(document, ctx.as_json, "重放", rows, ("文件", "状态")))
    return EXIT_OK if result.ok else EXIT_UNVERIFIED


# ---------------------------------------------------------------- 解析器

def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", help="证书/结果输出文件")


def build_parser() -> argparse.ArgumentParser:
    """构建命令行解析器"""
    parser = argparse.ArgumentParser(
        prog="ovoids", description="部分 m-卵形体与 rank-Ramsey 构造工具包")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--json", action="store_true", default=None, help="输出结构化 JSON")
    parser.add_argument("--log-level", choices=("DEBUG", "INFO", "WARNING", "ERROR"), help="日志级别")
    parser.add_argument("--config", help="配置文件路径")
    commands = parser.add_subparsers(dest="command", required=True)

    construct = commands.add_parser("construct", help="构造").add_subparsers(dest="target", required=True)

    cap = construct.add_parser("cap", help="二元射影空间中的帽及其 Cayley 图")
    cap.add_argument("--n", type=int, required=True)
    cap.add_argument("--emit-graph")
    cap.add_argument("--emit-points")
    cap.set_defaults(handler=cmd_construct_cap)

    bch = construct.add_parser("bch", help="BCH 2-近正交集")
    bch.add_argument("--h", type=int, required=True)
    bch.add_argument("--emit-vectors")
    bch.add_argument("--emit-graph")
    bch.add_argument("--check", action="store_true", help="穷举检查 2-近正交性")
    bch.set_defaults(handler=cmd_construct_bch)

    power = construct.add_parser("strong-power", help="强幂")
    power.add_argument("--graph", required=True)
    power.add_argument("--power", type=int, required=True)
    power.add_argument("--rank", action="store_true", help="计算强幂的 GF(2) 互补秩")
    power.add_argument("--emit-graph")
    power.set_defaults(handler=cmd_construct_strong_power)

    amplify = construct.add_parser("amplify", help="强幂加删点放大")
    amplify.add_argument("--graph", required=True)
    amplify.add_argument("--m", type=int, required=True)
    amplify.add_argument("--power", type=int, required=True)
    amplify.add_argument("--seed", type=int)
    amplify.add_argument("--emit-graph")
    amplify.set_defaults(handler=cmd_construct_amplify)

    sample = construct.add_parser("sample-ovoid", help="随机构造部分 m-卵形体")
    sample.add_argument("--family", default="W")
    sample.add_argument("--r", type=int, required=True)
    sample.add_argument("--q", type=int, required=True)
    sample.add_argument("--m", type=int, required=True)
    sample.add_argument("--rho", type=float)
    sample.add_argument("--trials", type=int)
    sample.add_argument("--seed", type=int)
    sample.add_argument("--emit-points")
    _add_output_flags(sample)
    sample.set_defaults(handler=cmd_construct_sample)

    verify = commands.add_parser("verify", help="验证").add_subparsers(dest="target", required=True)

    movoid = verify.add_parser("movoid", help="辛空间中的部分 m-卵形体")
    movoid.add_argument("--r", type=int, required=True)
    movoid.add_argument("--q", type=int, required=True)
    movoid.add_argument("--m", type=int, required=True)
    movoid.add_argument("--points", required=True)
    movoid.add_argument("--method", choices=[m.value for m in VerificationMethod])
    movoid.add_argument("--cross-check", action="store_true")
    _add_output_flags(movoid)
    movoid.set_defaults(handler=cmd_verify_movoid)

    nearly = verify.add_parser("nearly-orthogonal", help="m-近正交向量族")
    nearly.add_argument("--vectors", required=True)
    nearly.add_argument("--m", type=int, required=True)
    nearly.add_argument("--embed", action="store_true", help="同时在辛嵌入一侧验证")
    _add_output_flags(nearly)
    nearly.set_defaults(handler=cmd_verify_nearly_orthogonal)

    oddtown = verify.add_parser("oddtown", help="广义 Oddtown 族")
    oddtown.add_argument("--sets", required=True)
    oddtown.add_argument("--m", type=int, required=True)
    _add_output_flags(oddtown)
    oddtown.set_defaults(handler=cmd_verify_oddtown)

    cap_check = verify.add_parser("cap", help="帽")
    cap_check.add_argument("--n", type=int, required=True)
    cap_check.add_argument("--points", required=True)
    _add_output_flags(cap_check)
    cap_check.set_defaults(handler=cmd_verify_cap)

    rank = verify.add_parser("rank", help="矩阵秩与 Lempel 分解")
    rank.add_argument("--matrix", required=True)
    rank.add_argument("--integer", action="store_true", help="按整数矩阵读取并计算精确实秩")
    rank.add_argument("--expect-rank", type=int)
    rank.add_argument("--emit-factor", help="写出 Lempel 分解矩阵 B")
    _add_output_flags(rank)
    rank.set_defaults(handler=cmd_verify_rank)

    bounds = commands.add_parser("bounds", help="上界与不存在性判定")
    bounds.add_argument("--family", default="W")
    bounds.add_argument("--r", type=int)
    bounds.add_argument("--q", type=int)
    bounds.add_argument("--m", type=int, default=2)
    bounds.add_argument("--grid", action="store_true", help="按参数网格输出摘要行")
    bounds.add_argument("--families", help="逗号分隔的族列表（网格模式）")
    bounds.add_argument("--ranks", help="秩范围，例如 3..6")
    bounds.add_argument("--orders", help="域阶列表，例如 2,3")
    _add_output_flags(bounds)
    bounds.set_defaults(handler=cmd_bounds)

    replay_cmd = commands.add_parser("replay", help="按清单重放并比较输出")
    replay_cmd.add_argument("manifest")
    replay_cmd.set_defaults(handler=cmd_replay)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    命令行入口

    Args:
        argv: 参数列表，缺省取 sys.argv[1:]

    Returns:
        退出码：0 成功/已验证，1 未通过验证，2 参数或格式错误
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_ERROR

    if args.config:
        config.load_file(args.config)
    setup_logging(args.log_level or config.get_log_level())
    ctx = CommandContext(args, argv)
    if args.config:
        ctx.manifest.add_input(args.config)

    handler: Callable[[CommandContext], int] = args.handler
    try:
        code = handler(ctx)
    except OvoidError as e:
        print(f"错误: {e}", file=sys.stderr)
        return EXIT_ERROR
    ctx.finish()
    return code
