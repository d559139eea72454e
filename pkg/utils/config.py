"""
配置管理模块
用于管理部分 m-卵形体工具包的运行参数
"""
import json
import os
from pathlib import Path
from typing import Any, Dict, Optional

from utils.logger import get_logger

logger = get_logger("utils.config")

CONFIG_ENV = "OVOIDS_CONFIG"
THREADS_ENV = "OVOIDS_THREADS"
DEFAULT_CONFIG_FILE = Path(__file__).resolve().parent.parent / "config.json"


class ConfigManager:
    """配置管理器"""

    def __init__(self, config_file: Optional[str] = None):
        """
        初始化配置管理器

        Args:
            config_file: 配置文件路径，缺省时依次使用环境变量和仓库根目录的 config.json
        """
        if config_file is None:
            config_file = os.environ.get(CONFIG_ENV) or str(DEFAULT_CONFIG_FILE)
        self.config_file = Path(config_file)
        self.config_data: Dict[str, Any] = {}
        self._default_config = {
            "default_seed": 20240917,
            "threads": 1,
            "log_level": "INFO",
            "output_format": "table",        # table, json
            "max_strong_power_vertices": 100000,
            "max_enumeration_points": 1 << 16,
            "max_generator_rank": 5,
            "sampler_trials": 100,
            "bch_max_h": 7,
        }
        self.load_config()

    def load_config(self) -> None:
        """加载配置文件（只读，文件缺失时使用默认值）"""
        self.config_data = self._default_config.copy()
        try:
            if self.config_file.exists():
                with open(self.config_file, "r", encoding="utf-8") as f:
                    loaded = json.load(f)
                if not isinstance(loaded, dict):
                    raise ValueError("顶层必须是对象")
                # 合并默认配置，确保所有键都存在
                self.config_data.update(loaded)
        except (json.JSONDecodeError, ValueError, PermissionError, OSError) as e:
            logger.warning("配置文件加载失败，使用默认配置: %s", e)
            self.config_data = self._default_config.copy()

    def load_file(self, config_file: str) -> None:
        """切换到另一个配置文件并重新加载"""
        self.config_file = Path(config_file)
        self.load_config()

    def save_config(self) -> bool:
        """
        保存配置到文件

        Returns:
            bool: 保存是否成功
        """
        try:
            with open(self.config_file, "w", encoding="utf-8") as f:
                json.dump(self.config_data, f, indent=4, ensure_ascii=False)
            return True
        except (PermissionError, OSError) as e:
            logger.error("配置文件保存失败: %s", e)
            return False

    def get(self, key: str, default: Any = None) -> Any:
        """
        获取配置值

        Args:
            key: 配置键名
            default: 默认值

        Returns:
            配置值
        """
        return self.config_data.get(key, default)

    def set(self, key: str, value: Any) -> None:
        """
        设置配置值

        Args:
            key: 配置键名
            value: 配置值
        """
        self.config_data[key] = value

    def get_int(self, key: str) -> int:
        """获取整数配置，非法值回退到默认值"""
        try:
            return int(self.get(key, self._default_config.get(key)))
        except (TypeError, ValueError):
            logger.warning("配置项 %s 不是整数，使用默认值", key)
            return int(self._default_config[key])

    def get_seed(self) -> int:
        """获取默认随机种子"""
        return self.get_int("default_seed")

    def get_threads(self) -> int:
        """获取线程数，环境变量优先"""
        env_value = os.environ.get(THREADS_ENV)
        if env_value:
            try:
                return max(1, int(env_value))
            except ValueError:
                logger.warning("环境变量 %s=%r 无效，忽略", THREADS_ENV, env_value)
        return max(1, self.get_int("threads"))

    def get_log_level(self) -> str:
        """获取日志级别"""
        return str(self.get("log_level", "INFO")).upper()

    def get_output_format(self) -> str:
        """获取默认输出格式"""
        fmt = self.get("output_format", "table")
        return fmt if fmt in ("table", "json") else "table"

    def reset_to_defaults(self) -> None:
        """重置为默认配置"""
        self.config_data = self._default_config.copy()
        self.save_config()


# 全局配置实例
config = ConfigManager()
