"""
日志模块
统一的日志命名空间和输出格式
"""
import logging
from typing import Optional, Union

ROOT_LOGGER = "ovoids"
LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """
    获取包内日志记录器

    Args:
        name: 子模块名称，例如 "core.graphs"

    Returns:
        位于 ovoids 命名空间下的日志记录器
    """
    if not name:
        return logging.getLogger(ROOT_LOGGER)
    return logging.getLogger(f"{ROOT_LOGGER}.{name}")


def setup_logging(level: Union[str, int] = "INFO") -> logging.Logger:
    """
    安装标准错误输出的日志处理器（重复调用只更新级别）

    Args:
        level: 日志级别名称或数值

    Returns:
        根日志记录器
    """
    logger = logging.getLogger(ROOT_LOGGER)
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.INFO
    logger.setLevel(level)

    if not any(getattr(h, "_ovoids_handler", False) for h in logger.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._ovoids_handler = True
        logger.addHandler(handler)
    logger.propagate = False
    return logger
