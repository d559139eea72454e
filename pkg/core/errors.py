"""
异常定义模块
所有核心模块共用的异常类型
"""
from typing import Optional


class OvoidError(Exception):
    """工具包异常基类"""


class ParameterError(OvoidError, ValueError):
    """参数不满足前置条件"""


class SizeLimitError(ParameterError):
    """问题规模超出可计算范围"""


class FormatError(OvoidError, ValueError):
    """文本文件格式错误，附带文件路径和行号"""

    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        self.message = message
        self.line = line
        self.path = path
        super().__init__(self._render())

    def _render(self) -> str:
        location = self.path or "<输入>"
        if self.line is not None:
            location = f"{location}:{self.line}"
        return f"{location}: {self.message}"
