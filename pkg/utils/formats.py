"""
文本格式模块
矩阵、图、点集/向量族、子集族与证书 JSON 的读写；
读取失败时抛出带行号的 FormatError
"""
import json
from pathlib import Path
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from core.errors import FormatError, ParameterError
from core.gf2linalg import BitMatrix, IntMatrix
from core.graphs import Graph

PathLike = Union[str, Path]


def _content_lines(text: str) -> Iterator[Tuple[int, str]]:
    """跳过空行和 # 注释，返回 (行号, 内容)"""
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line


def read_text(path: PathLike) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise FormatError(f"无法读取文件: {e}", path=str(path)) from e


def write_text(path: PathLike, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _header(lines: List[Tuple[int, str]], count: int, what: str, path: Optional[str]) -> Tuple[int, ...]:
    if not lines:
        raise FormatError(f"缺少{what}头部", line=1, path=path)
    number, line = lines[0]
    parts = line.split()
    if len(parts) != count or not all(p.isdigit() for p in parts):
        raise FormatError(f"{what}头部应为 {count} 个非负整数，读到 {line!r}", line=number, path=path)
    return tuple(int(p) for p in parts)


# ---------------------------------------------------------------- 矩阵

def parse_bitmatrix(text: str, path: Optional[str] = None) -> BitMatrix:
    """首行 "rows cols"，之后每行一个 0/1 字符串"""
    lines = list(_content_lines(text))
    rows, cols = _header(lines, 2, "矩阵", path)
    body = lines[1:]
    if len(body) != rows:
        raise FormatError(f"声明 {rows} 行，实际 {len(body)} 行", line=body[-1][0] if body else lines[0][0], path=path)
    values = []
    for number, line in body:
        if len(line) != cols or set(line) - {"0", "1"}:
            raise FormatError(f"应为长度 {cols} 的 0/1 字符串", line=number, path=path)
        values.append(int(line[::-1], 2) if cols else 0)
    return BitMatrix.from_int_rows(values, cols)


def format_bitmatrix(matrix: BitMatrix) -> str:
    dense = matrix.to_dense()
    out = [f"{matrix.rows} {matrix.cols}"]
    out.extend("".join(str(int(x)) for x in row) for row in dense)
    return "\n".join(out) + "\n"


def parse_intmatrix(text: str, path: Optional[str] = None) -> IntMatrix:
    """首行 "rows cols"，之后每行若干个空白分隔的整数"""
    lines = list(_content_lines(text))
    rows, cols = _header(lines, 2, "矩阵", path)
    body = lines[1:]
    if len(body) != rows:
        raise FormatError(f"声明 {rows} 行，实际 {len(body)} 行", line=body[-1][0] if body else lines[0][0], path=path)
    entries = []
    for number, line in body:
        parts = line.split()
        if len(parts) != cols:
            raise FormatError(f"应有 {cols} 个整数，读到 {len(parts)} 个", line=number, path=path)
        try:
            entries.append([int(p) for p in parts])
        except ValueError:
            raise FormatError("包含非整数项", line=number, path=path) from None
    return IntMatrix(entries, cols)


# ---------------------------------------------------------------- 图

def parse_graph(text: str, path: Optional[str] = None) -> Graph:
    """首行顶点数 N，之后每行一条边 "u v"（从 0 编号）"""
    lines = list(_content_lines(text))
    (n,) = _header(lines, 1, "图", path)
    edges = []
    for number, line in lines[1:]:
        parts = line.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise FormatError(f"边应为两个非负整数，读到 {line!r}", line=number, path=path)
        u, v = int(parts[0]), int(parts[1])
        if u >= n or v >= n:
            raise FormatError(f"端点超出 0..{n - 1}", line=number, path=path)
        if u == v:
            raise FormatError("不允许自环", line=number, path=path)
        edges.append((u, v))
    return Graph.from_edges(n, edges)


def format_graph(graph: Graph) -> str:
    out = [str(graph.n)]
    out.extend(f"{u} {v}" for u, v in graph.edges())
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- 向量与点

def _parse_vector(line: str, number: int, path: Optional[str]) -> List[int]:
    if "," in line:
        parts = [p.strip() for p in line.split(",")]
        if not all(p.isdigit() for p in parts):
            raise FormatError(f"坐标必须是非负整数，读到 {line!r}", line=number, path=path)
        return [int(p) for p in parts]
    if set(line) - {"0", "1"}:
        raise FormatError(f"应为 0/1 字符串或逗号分隔的坐标，读到 {line!r}", line=number, path=path)
    return [int(ch) for ch in line]


def parse_vectors(text: str, path: Optional[str] = None) -> Tuple[int, List[List[int]]]:
    """
    每行一个向量，返回 (维数, 坐标列表)

    所有行的长度必须一致。
    """
    dimension: Optional[int] = None
    vectors = []
    for number, line in _content_lines(text):
        coords = _parse_vector(line, number, path)
        if dimension is None:
            dimension = len(coords)
        elif len(coords) != dimension:
            raise FormatError(f"维数应为 {dimension}，读到 {len(coords)}", line=number, path=path)
        vectors.append(coords)
    return dimension or 0, vectors


def parse_binary_family(text: str, path: Optional[str] = None) -> Tuple[int, List[int]]:
    """二元向量族（按位编码，第 j 个字符是第 j 位），拒绝零向量"""
    dimension = 0
    values = []
    for number, line in _content_lines(text):
        coords = _parse_vector(line, number, path)
        if any(c > 1 for c in coords):
            raise FormatError("二元向量的坐标只能是 0 或 1", line=number, path=path)
        if values and len(coords) != dimension:
            raise FormatError(f"维数应为 {dimension}，读到 {len(coords)}", line=number, path=path)
        dimension = len(coords)
        value = sum(c << j for j, c in enumerate(coords))
        if value == 0:
            raise FormatError("不允许零向量", line=number, path=path)
        values.append(value)
    return dimension, values


def format_binary_vectors(values: Sequence[int], dimension: int) -> str:
    return "".join("".join(str((v >> j) & 1) for j in range(dimension)) + "\n" for v in values)


def parse_points(text: str, space, path: Optional[str] = None) -> List[int]:
    """
    读取辛空间中的点，GF(2) 用 0/1 字符串，GF(p) 用逗号分隔的坐标

    Args:
        text: 文件内容
        space: SymplecticSpace
        path: 用于错误信息的路径

    Returns:
        规范化后的点编码
    """
    points = []
    for number, line in _content_lines(text):
        coords = _parse_vector(line, number, path)
        try:
            points.append(space.canonical(space.pack(coords)))
        except ParameterError as e:
            raise FormatError(str(e), line=number, path=path) from None
    return points


def format_points(space, points: Sequence[int]) -> str:
    lines = []
    for x in points:
        coords = space.point_coordinates(x)
        lines.append("".join(map(str, coords)) if space.q == 2 else ",".join(map(str, coords)))
    return "".join(line + "\n" for line in lines)


# ---------------------------------------------------------------- 证书

def dump_json(document: dict) -> str:
    """键排序、两空格缩进，保证逐字节可复现"""
    return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def parse_json(text: str, path: Optional[str] = None) -> dict:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"JSON 解析失败: {e.msg}", line=e.lineno, path=path) from None
    if not isinstance(document, dict):
        raise FormatError("顶层必须是对象", line=1, path=path)
    return document
