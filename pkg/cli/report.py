"""
报告输出模块
把命令结果渲染为人读的表格或结构化 JSON
"""
from typing import Dict, List, Mapping, Sequence

from utils.formats import dump_json


def _cell(value: object) -> str:
    if isinstance(value, bool):
        return "是" if value else "否"
    if isinstance(value, float):
        return f"{value:.6g}"
    if value is None:
        return "-"
    if isinstance(value, (list, tuple)):
        return ", ".join(_cell(v) for v in value)
    if isinstance(value, dict):
        return ", ".join(f"{k}={_cell(v)}" for k, v in value.items())
    return str(value)


def _width(text: str) -> int:
    """中文字符按两个终端列计"""
    return sum(2 if ord(ch) > 0x2E7F else 1 for ch in text)


def _pad(text: str, width: int) -> str:
    return text + " " * (width - _width(text))


def format_table(headers: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    """
    对齐的纯文本表格

    Args:
        headers: 列名
        rows: 行

    Returns:
        以换行结尾的表格文本
    """
    cells = [[_cell(v) for v in row] for row in rows]
    widths = [_width(h) for h in headers]
    for row in cells:
        for i, text in enumerate(row):
            widths[i] = max(widths[i], _width(text))
    lines = [
        "  ".join(_pad(h, w) for h, w in zip(headers, widths)).rstrip(),
        "  ".join("-" * w for w in widths),
    ]
    lines.extend("  ".join(_pad(t, w) for t, w in zip(row, widths)).rstrip() for row in cells)
    return "\n".join(lines) + "\n"


def format_fields(title: str, fields: Mapping[str, object]) -> str:
    """标题加键值两列"""
    rows = [(key, value) for key, value in fields.items()]
    return f"{title}\n" + format_table(("项目", "值"), rows)


def format_spectrum(spectrum: Mapping[int, int]) -> str:
    """{9:1, 5:1, ...} 按特征值降序写成 9^1 5^1 ..."""
    return " ".join(f"{value}^{count}" for value, count in sorted(spectrum.items(), reverse=True))


def render(document: Dict[str, object], as_json: bool, title: str = "",
           table: Sequence[Sequence[object]] = (), headers: Sequence[str] = ()) -> str:
    """
    JSON 模式输出完整文档；表格模式输出标量字段，另附一个可选的明细表

    Args:
        document: 结构化结果
        as_json: 是否输出 JSON
        title: 表格模式的标题
        table: 明细表行
        headers: 明细表列名

    Returns:
        输出文本
    """
    if as_json:
        return dump_json(document)
    scalars = {k: v for k, v in document.items() if not isinstance(v, (list, dict)) or k in ("notes",)}
    parts: List[str] = [format_fields(title, scalars)]
    if table:
        parts.append(format_table(headers, table))
    return "\n".join(parts)
