#!/usr/bin/env python3
"""
部分 m-卵形体工具包
主程序入口

功能特性:
- 构造：二元帽的 Cayley 图、BCH 2-近正交集、强幂放大、随机部分 m-卵形体
- 验证：部分 m-卵形体、m-近正交集、广义 Oddtown 族、帽，输出可复核证书
- 上界：极空间部分 m-卵形体的各类上界与不存在性判定，支持参数网格和 CSV
- 可复现：每个输出文件旁写运行清单，可按清单重放并比较摘要

使用方法:
    python main.py construct cap --n 5 --emit-graph cap5.txt
    python main.py verify nearly-orthogonal --vectors bch2.txt --m 2
    python main.py bounds --family W --r 3 --q 2 --m 2
    python main.py replay cap5.txt.manifest.json

要求:
    - Python 3.10+
    - numpy

版本: 1.0.0
"""

import os
import sys

# 确保可以导入项目模块
current_dir = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, current_dir)


def check_python_version():
    """检查Python版本"""
    if sys.version_info < (3, 10):
        print("错误: 需要Python 3.10或更高版本", file=sys.stderr)
        print(f"当前版本: {sys.version}", file=sys.stderr)
        return False
    return True


def check_numpy():
    """检查numpy是否可用"""
    try:
        import numpy  # noqa: F401
        return True
    except ImportError:
        print("错误: 未找到numpy模块", file=sys.stderr)
        print("请安装依赖: pip install -r requirements.txt", file=sys.stderr)
        return False


def check_dependencies():
    """检查所有依赖"""
    if not check_python_version():
        return False

    if not check_numpy():
        return False

    return True


def main():
    """主函数"""
    try:
        if not check_dependencies():
            return 2

        from cli.commands import main as cli_main
        return cli_main(sys.argv[1:])

    except KeyboardInterrupt:
        print("\n程序被用户中断", file=sys.stderr)
        return 130


if __name__ == "__main__":
    exit_code = main()
    sys.exit(exit_code)
