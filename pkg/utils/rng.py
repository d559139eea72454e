"""
随机数模块
基于 PCG64 的可复现、可拆分随机数生成器
"""
from typing import List

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    """
    创建固定种子的生成器

    Args:
        seed: 非负整数种子

    Returns:
        PCG64 生成器
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def spawn_rngs(seed: int, count: int) -> List[np.random.Generator]:
    """
    从根种子拆分出互相独立的子生成器，每个试验一个

    Args:
        seed: 根种子
        count: 子生成器数量

    Returns:
        子生成器列表，顺序固定
    """
    children = np.random.SeedSequence(int(seed)).spawn(count)
    return [np.random.Generator(np.random.PCG64(child)) for child in children]
