# 核心模块 - 有限几何与极值组合的精确计算
__version__ = "1.0.0"
