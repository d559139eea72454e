# 工具模块 - 配置、日志、文件格式与运行清单
