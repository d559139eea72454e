"""
命令行界面模块
"""
