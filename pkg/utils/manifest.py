"""
运行清单模块
记录命令行、版本、随机种子与输入/输出文件摘要，用于逐字节复现
"""
import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from core.errors import FormatError
from utils.logger import get_logger

logger = get_logger("utils.manifest")

MANIFEST_SUFFIX = ".manifest.json"


def sha256_file(path: str) -> str:
    """计算文件的 SHA-256 摘要"""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def manifest_path(output: str) -> str:
    return str(output) + MANIFEST_SUFFIX


@dataclass
class RunManifest:
    """一次命令运行的清单"""

    argv: List[str]
    version: str
    seeds: List[int] = field(default_factory=list)
    inputs: Dict[str, str] = field(default_factory=dict)
    outputs: Dict[str, str] = field(default_factory=dict)
    wall_time: float = 0.0

    def add_input(self, path: str) -> None:
        self.inputs[str(path)] = sha256_file(path)

    def add_output(self, path: str) -> None:
        self.outputs[str(path)] = sha256_file(path)

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)

    def write(self, path: Optional[str] = None) -> str:
        """
        写入清单，缺省放在第一个输出文件旁边

        Returns:
            清单文件路径
        """
        if path is None:
            if not self.outputs:
                raise ValueError("没有输出文件，无法确定清单位置")
            path = manifest_path(next(iter(self.outputs)))
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, sort_keys=True, indent=2, ensure_ascii=False)
            f.write("\n")
        logger.debug("清单已写入 %s", path)
        return path

    @classmethod
    def load(cls, path: str) -> "RunManifest":
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise FormatError(f"清单 JSON 解析失败: {e.msg}", line=e.lineno, path=path) from None
        except OSError as e:
            raise FormatError(f"无法读取清单: {e}", path=path) from None
        try:
            return cls(
                argv=[str(a) for a in data["argv"]],
                version=str(data["version"]),
                seeds=[int(s) for s in data.get("seeds", [])],
                inputs=dict(data.get("inputs", {})),
                outputs=dict(data.get("outputs", {})),
                wall_time=float(data.get("wall_time", 0.0)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise FormatError(f"清单字段缺失或类型错误: {e}", path=path) from None


@dataclass(frozen=True)
class ReplayResult:
    """重放结果：重新计算的摘要与原清单的对比"""

    exit_code: int
    matched: List[str]
    mismatched: List[str]
    missing_inputs: List[str]

    @property
    def ok(self) -> bool:
        return self.exit_code in (0, 1) and not self.mismatched and not self.missing_inputs


def replay(path: str, runner: Callable[[Sequence[str]], int]) -> ReplayResult:
    """
    按清单重新执行命令并比较输出摘要

    Args:
        path: 清单文件路径
        runner: 执行 argv 并返回退出码的函数

    Returns:
        ReplayResult
    """
    manifest = RunManifest.load(path)
    missing = []
    for name, digest in manifest.inputs.items():
        if not Path(name).exists() or sha256_file(name) != digest:
            missing.append(name)
    if missing:
        logger.warning("输入文件缺失或已改变: %s", ", ".join(missing))

    exit_code = runner(manifest.argv)
    matched, mismatched = [], []
    for name, digest in manifest.outputs.items():
        if Path(name).exists() and sha256_file(name) == digest:
            matched.append(name)
        else:
            mismatched.append(name)
    if mismatched:
        logger.error("重放结果不一致: %s", ", ".join(mismatched))
    else:
        logger.info("重放完成，%d 个输出全部一致", len(matched))
    return ReplayResult(exit_code, matched, mismatched, missing)
